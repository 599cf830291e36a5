#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace dnskit {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::vector<double>& v,
                             std::uint64_t h = kFnvOffset) {
  return fnv1a64(v.data(), v.size() * sizeof(double), h);
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = kFnvOffset) {
  return fnv1a64(s.data(), s.size(), h);
}

}  // namespace dnskit
