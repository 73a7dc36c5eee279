#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "zoneforge/common.hpp"

namespace zoneforge::csv {

/// Header-indexed CSV reader. Minimal quoting support ("..." with doubled
/// quotes inside). Rows are handed to the visitor as string views into an
/// internal buffer together with their 1-based line number.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  int column(const std::string& name) const;           // -1 if absent
  int require_column(const std::string& name) const;   // throws ValidationError

  /// Calls fn(fields, line_no) for every data row.
  void for_each_row(const std::function<void(const std::vector<std::string>&, long)>& fn);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, int> index_;
};

std::vector<std::string> split_line(const std::string& line);

long parse_count(const std::string& field, const std::filesystem::path& file, long line);
double parse_double(const std::string& field, const std::filesystem::path& file, long line);

/// Shortest round-trip representation (std::to_chars), so emitted files
/// reload bit-exactly and runs are byte-stable.
std::string format_double(double v);

class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace zoneforge::csv
