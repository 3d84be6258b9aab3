#include <chebfit/csv.hpp>
#include <chebfit/linalg/types.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chebfit::csv {

std::string format_real(double value) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_real(std::string_view field, std::string_view context) {
  const std::string_view f = trim(field);
  double value = 0.0;
  if (f == "inf" || f == "+inf") return std::numeric_limits<double>::infinity();
  if (f == "-inf") return -std::numeric_limits<double>::infinity();
  const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    throw InvalidInputError(std::string(context) + ": cannot parse '" +
                            std::string(f) + "' as a real number");
  }
  return value;
}

long long parse_integer(std::string_view field, std::string_view context) {
  const std::string_view f = trim(field);
  long long value = 0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    throw InvalidInputError(std::string(context) + ": cannot parse '" +
                            std::string(f) + "' as an integer");
  }
  return value;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell =
        line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    out.emplace_back(trim(cell));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw InvalidInputError(path.string() + ": row has " +
                              std::to_string(cells.size()) + " fields, header has " +
                              std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw InvalidInputError(path.string() + ": empty file");
  return table;
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace chebfit::csv
