#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace infocons::csv {

/// Shortest round-trip representation of `v` (locale independent).
std::string format_number(double v);
std::string format_number(long long v);

/// Comma-separated writer: `.` decimal, LF endings, no quoting.
class Writer {
 public:
  Writer(std::ostream& out, std::initializer_list<std::string_view> columns);
  Writer(std::ostream& out, std::span<const std::string> columns);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) {
    row(std::span<const double>(values.begin(), values.size()));
  }

  std::size_t columns() const noexcept { return columns_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Splits on commas and trims ASCII whitespace from each field.
std::vector<std::string> split_fields(std::string_view line);

/// Parses one real; throws infocons::Error with `context` on failure.
double parse_number(std::string_view field, std::string_view context);

/// Reads every non-empty, non-`#` line as a row of reals.
std::vector<std::vector<double>> read_numeric_rows(std::istream& in, std::string_view context);
std::vector<std::vector<double>> read_numeric_file(const std::filesystem::path& path);

}  // namespace infocons::csv
