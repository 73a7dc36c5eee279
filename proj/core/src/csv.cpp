#include "zoneforge/csv.hpp"

#include <array>
#include <charconv>
#include <system_error>

namespace zoneforge::csv {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

Reader::Reader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw ValidationError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in_, line)) throw ValidationError("empty file: " + path.string());
  header_ = split_line(line);
  for (int i = 0; i < static_cast<int>(header_.size()); ++i) index_[header_[i]] = i;
}

int Reader::column(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int Reader::require_column(const std::string& name) const {
  int c = column(name);
  if (c < 0)
    throw ValidationError(path_.string() + ": missing required column '" + name + "'");
  return c;
}

void Reader::for_each_row(const std::function<void(const std::vector<std::string>&, long)>& fn) {
  std::string line;
  long line_no = 1;  // header was line 1
  while (std::getline(in_, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto fields = split_line(line);
    if (fields.size() != header_.size())
      throw ValidationError(path_.string() + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(header_.size()) +
                            " fields, got " + std::to_string(fields.size()));
    fn(fields, line_no);
  }
}

long parse_count(const std::string& field, const std::filesystem::path& file, long line) {
  long v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || p != field.data() + field.size())
    throw ValidationError(file.string() + ":" + std::to_string(line) +
                          ": not an integer: '" + field + "'");
  return v;
}

double parse_double(const std::string& field, const std::filesystem::path& file, long line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || p != field.data() + field.size())
    throw ValidationError(file.string() + ":" + std::to_string(line) +
                          ": not a number: '" + field + "'");
  return v;
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), p);
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw ValidationError("cannot write file: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw ValidationError("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void Writer::close() { out_.close(); }

}  // namespace zoneforge::csv
