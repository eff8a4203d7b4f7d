#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "tabsynth/table.hpp"

namespace tabsynth {

struct Prompt {
  std::string text;
  std::size_t row_count_included = 0;
  std::size_t char_count = 0;
};

// Single-quoted Python string literal. Backslashes and quotes are escaped;
// newlines are rejected because the template has one assignment per line.
std::string python_string_literal(std::string_view cell);

// `df = pd.DataFrame()` followed by one `df['<name>'] = [...]` line per
// column. No trailing newline. Column lines are omitted for an empty table.
std::string render_dataframe(const Table& rows);

// import line, dataframe block, then `#<query>` as the final line.
Prompt build_prompt(std::string_view query, const Table& rows);

}  // namespace tabsynth
