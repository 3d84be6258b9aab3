#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chebfit::csv {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_real(double value);

/// Parses a full-field double; throws InvalidInputError with `context`.
double parse_real(std::string_view field, std::string_view context);
long long parse_integer(std::string_view field, std::string_view context);

std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index for `name`, or -1.
  int column(std::string_view name) const;
};

/// Reads a comma-separated file with a header line. Blank lines are skipped.
Table read(const std::filesystem::path& path);

/// Writes `contents` to `path`, creating parent directories. Throws
/// std::runtime_error with the path on failure.
void write_text(const std::filesystem::path& path, std::string_view contents);

}  // namespace chebfit::csv
