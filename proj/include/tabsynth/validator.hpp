#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "tabsynth/exec_bridge.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

struct MatchOptions {
  double relative_error = 0.01;
  bool case_sensitive = false;
  // Compared case-insensitively.
  std::set<std::string> true_strings{"true", "yes", "t", "y", "1"};
  std::set<std::string> false_strings{"false", "no", "f", "n", "0"};

  void validate() const;
};

struct CellMismatch {
  std::string column;  // expected column name
  std::size_t row = 0;
  std::string expected;
  std::string actual;
};

struct MatchResult {
  bool matched = false;
  // expected column name -> actual column name; present iff matched
  std::optional<std::map<std::string, std::string>> column_mapping;
  std::optional<CellMismatch> first_mismatch;
};

// A valid output executed cleanly and has the input's row count and at least
// one column.
bool is_valid(const ExecOutput& output, const Table& input);

// Optional sign, digits with optional fraction, optional exponent; leading
// and trailing whitespace allowed. No thousands separators, inf or nan.
bool looks_numeric(std::string_view s);

// Exact string, case-insensitive string (unless case_sensitive), numeric
// within relative error of the expected value (strictly less than
// relative_error * max(|expected|, 1e-9), evaluated in exact decimal
// arithmetic), or boolean expected with an equivalent 0/1 or truth string.
bool cells_match(std::string_view expected, std::string_view actual, const MatchOptions& opts);

// Finds an injective mapping of expected columns onto actual columns under
// which every row-aligned cell matches. Extra actual columns, column order
// and headers are ignored. Throws InvalidArgument on a row-count mismatch.
MatchResult outputs_match(const Table& expected, const Table& actual, const MatchOptions& opts);

}  // namespace tabsynth
