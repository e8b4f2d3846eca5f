#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace pof {

/// Error raised for contract violations (bad shapes, bad configs, degenerate
/// inputs). `kind` is a short machine-readable tag, `what()` the full message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

template <typename... Parts>
[[noreturn]] void fail(const std::string& kind, Parts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  throw Error(kind, os.str());
}

inline void require(bool cond, const std::string& kind, const std::string& message) {
  if (!cond) throw Error(kind, message);
}

}  // namespace pof
