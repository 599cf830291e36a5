#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace dnskit {

// Contract violations and I/O failures throw Error; the CLI maps it to a
// single-line diagnostic and a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

// fail("bad frame count: ", n, " expected ", m)
template <class... Args>
[[noreturn]] void fail(const Args&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  throw Error(os.str());
}

template <class... Args>
void require(bool cond, const Args&... parts) {
  if (!cond) fail(parts...);
}

}  // namespace dnskit
