#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace smi::csv {

// Every CSV the pipeline writes starts with one schema line of the form
//   # smi:<kind>:v<version>
// followed by a header row. Readers reject files whose schema line does not
// match the kind and version they expect.
inline constexpr int kSchemaVersion = 1;

std::string schema_line(std::string_view kind);

// RFC-4180 style quoting, applied only when needed.
std::string escape(std::string_view field);
std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int column(std::string_view name) const;
  // Like column() but throws DataError naming the file when absent.
  std::size_t require_column(std::string_view name, std::string_view source) const;
};

// Reads a pipeline-written CSV, checking the schema line.
Table read_versioned(const std::string& path, std::string_view kind);
// Reads an external CSV; a leading '#' schema/comment line is tolerated.
Table read_plain(const std::string& path);
Table parse_plain(std::istream& in, std::string_view source);

class Writer {
 public:
  Writer(std::ostream& out, std::string_view kind, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  std::size_t width_;
};

// Shortest round-trip decimal representation.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace smi::csv
