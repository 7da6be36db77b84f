// Minimal comma-separated table I/O. Fields never contain commas or quotes in
// the files this project produces, so no quoting is supported.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace naqtur {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line numbers of the rows in the source file
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(std::string_view name) const;
  // Names from `required` that are absent from the header.
  std::vector<std::string> missing(const std::vector<std::string>& required) const;
};

// Rows with a field count different from the header are kept; callers decide.
CsvTable read_csv_table(const std::string& path);
void write_csv_table(const CsvTable& table, const std::string& path);

std::vector<std::string> split_csv_line(std::string_view line);

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
// Accepts everything format_double emits. Throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

}  // namespace naqtur
