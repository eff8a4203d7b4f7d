#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabsynth/errors.hpp"

namespace tabsynth {

struct Column {
  std::string name;
  std::vector<std::string> cells;

  bool operator==(const Column&) const = default;
};

// Column-major grid of raw string cells. Immutable once constructed: every
// column has row_count() cells and names are unique and non-empty.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }

  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  const std::string& cell(std::size_t column, std::size_t row) const {
    return columns_.at(column).cells.at(row);
  }

  bool operator==(const Table&) const = default;

 private:
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

// Ordered, duplicate-free row indices. Order is the selection order.
using RowSelection = std::vector<std::size_t>;

enum class TableFormat { csv, column_major_json };

// Rows of `table` in selection order. Throws InvalidArgument naming the first
// out-of-range or repeated index.
Table project_rows(const Table& table, std::span<const std::size_t> selection);

Table parse_table(std::string_view text, TableFormat format);
std::string serialize_table(const Table& table, TableFormat format);

// Picks the format from the extension: .csv is CSV, anything else JSON.
Table load_table_file(const std::string& path);

// Throws ParseError if `text` is not valid UTF-8. Positions are 1-based.
void check_utf8(std::string_view text);

}  // namespace tabsynth
