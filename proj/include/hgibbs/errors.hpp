#pragma once

#include <stdexcept>
#include <string>

namespace hgibbs {

enum class ErrorKind {
  invalid_argument,
  capability,       // request exceeds an implementation cap (e.g. mode index)
  resolution,       // a grid or truncation cannot reach the requested accuracy
  shape,            // array sizes do not match the basis
  domain,           // numerical domain violation (log of nonpositive data, ...)
  undefined_ratio,  // ratio with a vanishing denominator
  contract,         // API misuse (incompatible merge, ...)
  config,           // rejected experiment configuration
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace hgibbs
