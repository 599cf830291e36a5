#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "dnskit/util/error.hpp"

namespace dnskit {

// Shortest round-trip formatting: export -> import is lossless and the byte
// output is deterministic across runs.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  require(ec == std::errc(), "to_chars failed");
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(),
          "bad numeric field: '", s, "'");
  return v;
}

inline long parse_long(const std::string& s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(),
          "bad integer field: '", s, "'");
  return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : os_(path, std::ios::binary) {
    require(os_.good(), "cannot open for writing: ", path);
    path_ = path;
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      require(fields[i].find(',') == std::string::npos &&
                  fields[i].find('\n') == std::string::npos,
              "CSV field must not contain separators: '", fields[i], "'");
      if (i) os_ << ',';
      os_ << fields[i];
    }
    os_ << '\n';
  }
  void close() {
    os_.close();
    require(os_.good(), "write failed: ", path_);
  }

 private:
  std::ofstream os_;
  std::string path_;
};

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot open: ", path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

}  // namespace dnskit
