#include "tabsynth/table.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "tabsynth/json_io.hpp"

namespace tabsynth {

ParseError::ParseError(const std::string& message, std::size_t line_, std::size_t column_)
    : Error(line_ == 0 ? message
                       : message + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(column_) + ")"),
      line(line_),
      column(column_) {}

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& c = columns_[i];
    if (c.name.empty()) {
      throw InvalidArgument("column " + std::to_string(i) + " has an empty name");
    }
    if (!seen.insert(c.name).second) {
      throw InvalidArgument("duplicate column name '" + c.name + "'");
    }
    if (i == 0) {
      row_count_ = c.cells.size();
    } else if (c.cells.size() != row_count_) {
      throw InvalidArgument("column '" + c.name + "' has " + std::to_string(c.cells.size()) +
                            " cells, expected " + std::to_string(row_count_));
    }
  }
}

Table project_rows(const Table& table, std::span<const std::size_t> selection) {
  std::vector<bool> used(table.row_count(), false);
  for (std::size_t idx : selection) {
    if (idx >= table.row_count()) {
      throw InvalidArgument("row index " + std::to_string(idx) + " out of range (row_count " +
                            std::to_string(table.row_count()) + ")");
    }
    if (used[idx]) throw InvalidArgument("row index " + std::to_string(idx) + " selected twice");
    used[idx] = true;
  }
  std::vector<Column> out;
  out.reserve(table.column_count());
  for (const Column& c : table.columns()) {
    Column projected{c.name, {}};
    projected.cells.reserve(selection.size());
    for (std::size_t idx : selection) projected.cells.push_back(c.cells[idx]);
    out.push_back(std::move(projected));
  }
  return Table(std::move(out));
}

void check_utf8(std::string_view text) {
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    auto b = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b < 0x80) {
      len = 1;
      cp = b;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else {
      throw ParseError("invalid UTF-8 lead byte", line, col);
    }
    if (i + len > text.size()) throw ParseError("truncated UTF-8 sequence", line, col);
    for (std::size_t k = 1; k < len; ++k) {
      auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) throw ParseError("invalid UTF-8 continuation byte", line, col);
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw ParseError("invalid UTF-8 code point", line, col);
    }
    if (cp == U'\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    i += len;
  }
}

namespace {

// RFC 4180 style: comma separator, double-quote quoting with "" escapes,
// CRLF or LF record terminators. A trailing terminator does not add a record.
std::vector<std::vector<std::string>> read_csv_records(std::string_view text,
                                                      std::vector<std::size_t>& record_lines) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1, col = 0;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record_lines.push_back(record_line);
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    ++col;
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
          ++col;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
        if (ch == '\n') {
          ++line;
          col = 0;
        }
      }
      continue;
    }
    if (!record_has_content) {
      record_line = line;
      record_has_content = true;
    }
    switch (ch) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError("unexpected quote inside unquoted field", line, col);
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        throw ParseError("bare carriage return", line, col);
      case '\n':
        end_record();
        ++line;
        col = 0;
        break;
      default:
        if (field_was_quoted) throw ParseError("text after closing quote", line, col);
        field.push_back(ch);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line, col);
  if (record_has_content) end_record();
  return records;
}

Table parse_csv(std::string_view text) {
  std::vector<std::size_t> lines;
  auto records = read_csv_records(text, lines);
  if (records.empty()) throw ParseError("CSV input has no header row", 1, 1);
  const auto& header = records.front();
  std::vector<Column> columns;
  std::unordered_set<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError("empty column name", lines[0], c + 1);
    if (!names.insert(header[c]).second) {
      throw ParseError("duplicate column name '" + header[c] + "'", lines[0], c + 1);
    }
    columns.push_back(Column{header[c], {}});
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw ParseError("ragged record: " + std::to_string(rec.size()) + " fields, header has " +
                           std::to_string(header.size()),
                       lines[r], 1);
    }
    for (std::size_t c = 0; c < rec.size(); ++c) columns[c].cells.push_back(rec[c]);
  }
  return Table(std::move(columns));
}

bool needs_csv_quotes(const std::string& s) {
  return s.empty() || s.find_first_of(",\"\r\n") != std::string::npos;
}

void write_csv_field(std::ostream& os, const std::string& s) {
  if (!needs_csv_quotes(s)) {
    os << s;
    return;
  }
  os << '"';
  for (char ch : s) {
    if (ch == '"') os << '"';
    os << ch;
  }
  os << '"';
}

std::string serialize_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    if (c) os << ',';
    write_csv_field(os, table.column(c).name);
  }
  os << '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      if (c) os << ',';
      // An empty single-column row would otherwise be a blank line.
      const std::string& cell = table.cell(c, r);
      if (cell.empty()) {
        os << "\"\"";
      } else {
        write_csv_field(os, cell);
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

Table parse_table(std::string_view text, TableFormat format) {
  check_utf8(text);
  if (format == TableFormat::csv) return parse_csv(text);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0);
  }
  return table_from_json(doc);
}

std::string serialize_table(const Table& table, TableFormat format) {
  if (format == TableFormat::csv) return serialize_csv(table);
  return table_to_json(table).dump();
}

Table load_table_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open table file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return parse_table(buf.str(), csv ? TableFormat::csv : TableFormat::column_major_json);
}

json columns_to_json(const Table& table) {
  json cols = json::array();
  for (const Column& c : table.columns()) cols.push_back(json::array({c.name, c.cells}));
  return cols;
}

Table table_from_columns_json(const json& columns) {
  if (!columns.is_array()) throw ParseError("\"columns\" must be an array");
  std::vector<Column> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const json& entry = columns[i];
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_array()) {
      throw ParseError("column entry " + std::to_string(i) + " must be [name, [cells...]]");
    }
    Column c{entry[0].get<std::string>(), {}};
    for (const json& cell : entry[1]) {
      if (!cell.is_string()) {
        throw ParseError("column '" + c.name + "' contains a non-string cell");
      }
      c.cells.push_back(cell.get<std::string>());
    }
    out.push_back(std::move(c));
  }
  try {
    return Table(std::move(out));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

json table_to_json(const Table& table) {
  json doc = json::object();
  doc["columns"] = columns_to_json(table);
  return doc;
}

Table table_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("columns")) {
    throw ParseError("table JSON must be an object with a \"columns\" member");
  }
  return table_from_columns_json(doc.at("columns"));
}

}  // namespace tabsynth
