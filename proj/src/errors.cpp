#include "hgibbs/errors.hpp"

namespace hgibbs {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::capability: return "capability";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::shape: return "shape";
    case ErrorKind::domain: return "domain";
    case ErrorKind::undefined_ratio: return "undefined_ratio";
    case ErrorKind::contract: return "contract";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hgibbs
