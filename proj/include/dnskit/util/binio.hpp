#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dnskit/util/error.hpp"
#include "dnskit/util/hash.hpp"

namespace dnskit {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

// Length-prefixed binary writer with a running FNV checksum over the payload.
class BinWriter {
 public:
  explicit BinWriter(std::ostream& os) : os_(os) {}

  void raw(const void* p, std::size_t n) {
    os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    hash_ = fnv1a64(p, n, hash_);
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    raw(v.data(), v.size() * sizeof(double));
  }
  std::uint64_t checksum() const { return hash_; }

 private:
  std::ostream& os_;
  std::uint64_t hash_ = kFnvOffset;
};

class BinReader {
 public:
  explicit BinReader(std::istream& is) : is_(is) {}

  void raw(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    require(static_cast<std::size_t>(is_.gcount()) == n,
            "truncated binary stream");
    hash_ = fnv1a64(p, n, hash_);
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::int64_t i64() {
    std::int64_t v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    require(n < (1ULL << 32), "implausible string length in binary stream");
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  std::vector<double> f64s() {
    const std::uint64_t n = u64();
    require(n < (1ULL << 32), "implausible array length in binary stream");
    std::vector<double> v(n);
    raw(v.data(), n * sizeof(double));
    return v;
  }
  std::uint64_t checksum() const { return hash_; }

 private:
  std::istream& is_;
  std::uint64_t hash_ = kFnvOffset;
};

}  // namespace dnskit
