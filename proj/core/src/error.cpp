#include "hyperfuse/error.hpp"

namespace hyperfuse {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io:
      return "io";
    case ErrorKind::format:
      return "format";
    case ErrorKind::domain:
      return "domain";
  }
  return "unknown";
}

}  // namespace hyperfuse
