#include "smi/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "smi/error.hpp"

namespace smi::csv {

std::string schema_line(std::string_view kind) {
  return "# smi:" + std::string(kind) + ":v" + std::to_string(kSchemaVersion);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t Table::require_column(std::string_view name, std::string_view source) const {
  const int idx = column(name);
  if (idx < 0) {
    throw DataError(std::string(source) + ": missing column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(idx);
}

namespace {

Table parse_body(std::istream& in, std::string_view source, std::string first) {
  Table table;
  table.header = split_line(first);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw DataError(std::string(source) + ": row has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

}  // namespace

Table read_versioned(const std::string& path, std::string_view kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != schema_line(kind)) {
    throw DataError(path + ": schema mismatch, expected '" + schema_line(kind) + "' got '" +
                    line + "'");
  }
  if (!std::getline(in, line)) throw DataError(path + ": missing header row");
  return parse_body(in, path, line);
}

Table parse_plain(std::istream& in, std::string_view source) {
  std::string line;
  do {
    if (!std::getline(in, line)) throw DataError(std::string(source) + ": empty file");
  } while (line.empty() || line[0] == '#');
  // Strip a UTF-8 byte-order mark, common in spreadsheet exports.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  return parse_body(in, source, line);
}

Table read_plain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_plain(in, path);
}

Writer::Writer(std::ostream& out, std::string_view kind, const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
  out_ << schema_line(kind) << '\n';
  row(header);
}

void Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::logic_error("csv::Writer: row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << escape(fields[i]);
  }
  out_ << '\n';
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw DataError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

long long parse_int(std::string_view text, std::string_view what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw DataError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace smi::csv
