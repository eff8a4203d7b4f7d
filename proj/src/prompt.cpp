#include "tabsynth/prompt.hpp"

#include <algorithm>

namespace tabsynth {

std::string python_string_literal(std::string_view cell) {
  std::string out;
  out.reserve(cell.size() + 2);
  out.push_back('\'');
  for (char ch : cell) {
    if (ch == '\n' || ch == '\r') {
      throw InvalidArgument("cell contains a line break and cannot be placed in the prompt");
    }
    if (ch == '\\' || ch == '\'') out.push_back('\\');
    out.push_back(ch);
  }
  out.push_back('\'');
  return out;
}

std::string render_dataframe(const Table& rows) {
  std::string out = "df = pd.DataFrame()";
  if (rows.row_count() == 0) return out;
  for (const Column& col : rows.columns()) {
    if (col.name.find_first_of("'\n\r") != std::string::npos) {
      throw InvalidArgument("column name '" + col.name + "' cannot be placed in the prompt");
    }
    out += "\ndf[";
    out += python_string_literal(col.name);
    out += "] = [";
    for (std::size_t r = 0; r < col.cells.size(); ++r) {
      if (r) out += ", ";
      out += python_string_literal(col.cells[r]);
    }
    out += "]";
  }
  return out;
}

Prompt build_prompt(std::string_view query, const Table& rows) {
  if (query.empty()) throw InvalidArgument("query must not be empty");
  if (query.find_first_of("\n\r") != std::string_view::npos) {
    throw InvalidArgument("query must be a single line");
  }
  Prompt p;
  p.text = "import pandas as pd\n";
  p.text += render_dataframe(rows);
  p.text += "\n#";
  p.text += query;
  p.row_count_included = rows.row_count();
  // Code points, not bytes.
  p.char_count = static_cast<std::size_t>(std::count_if(
      p.text.begin(), p.text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
  return p;
}

}  // namespace tabsynth
