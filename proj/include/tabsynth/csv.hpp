#ifndef TABSYNTH_CSV_HPP
#define TABSYNTH_CSV_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tabsynth/error.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

namespace csv {

/// Splits CSV text into records. Comma separator, double-quote quoting with
/// "" as the escaped quote, LF or CRLF line ends, optional UTF-8 BOM.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !record.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::ParseError, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

struct LoadOptions {
  /// Columns in the file that the schema does not name are skipped.
  bool ignore_extra_columns = true;
  /// Schema columns absent from the file are dropped from the result instead
  /// of raising MissingColumn (used by the dataset validator).
  bool allow_missing_columns = false;
};

inline Table table_from_csv_text(std::string_view text, const Schema& schema,
                                 const LoadOptions& options = {}) {
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorKind::ParseError, "CSV has no header row");
  const auto& header = records.front();

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!position.emplace(header[i], i).second) {
      throw Error(ErrorKind::DuplicateHeader, "header '" + header[i] + "' appears twice");
    }
    if (!options.ignore_extra_columns && !schema.contains(header[i])) {
      throw Error(ErrorKind::SchemaMismatch, "unexpected column '" + header[i] + "'");
    }
  }

  std::vector<ColumnSpec> specs;
  std::vector<std::size_t> source;
  for (const auto& spec : schema.columns()) {
    auto it = position.find(spec.name);
    if (it == position.end()) {
      if (options.allow_missing_columns) continue;
      throw Error(ErrorKind::MissingColumn, "CSV lacks column '" + spec.name + "'");
    }
    specs.push_back(spec);
    source.push_back(it->second);
  }

  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "data row " + std::to_string(r - 1) + " has " +
                                             std::to_string(rec.size()) + " fields, header has " +
                                             std::to_string(header.size()));
    }
    Row row;
    row.reserve(specs.size());
    for (std::size_t c = 0; c < specs.size(); ++c) {
      try {
        row.push_back(parse_cell(specs[c], rec[source[c]]));
      } catch (const Error& e) {
        throw Error(ErrorKind::TypeMismatch,
                    "row " + std::to_string(r - 1) + ", column " + specs[c].name + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return Table(Schema(std::move(specs)), std::move(rows));
}

inline Table load_table(const std::string& path, const Schema& schema,
                        const LoadOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return table_from_csv_text(buf.str(), schema, options);
}

inline std::string table_to_csv_text(const Table& table) {
  std::string out;
  const auto& cols = table.schema().columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out.push_back(',');
    out += csv::quote(cols[c].name);
  }
  out.push_back('\n');
  for (const auto& row : table.rows()) {
    // A lone missing cell would otherwise be a blank line, which readers skip.
    if (row.size() == 1 && is_missing(row[0])) {
      out += "\"\"\n";
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      out += csv::quote(format_cell(row[c]));
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write to " + path + " failed");
}

inline void save_table(const Table& table, const std::string& path) {
  write_text_file(path, table_to_csv_text(table));
}

}  // namespace tabsynth

#endif  // TABSYNTH_CSV_HPP
