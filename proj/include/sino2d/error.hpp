#pragma once

#include <stdexcept>
#include <string>

namespace sino2d {

enum class ErrorKind {
  InvalidArgument,
  SingularFrequency,
  EmptySearchRegion,
  NonConvergence,
  SingularMatrix,
  TooManyFailures,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::SingularFrequency: return "singular frequency";
    case ErrorKind::EmptySearchRegion: return "empty search region";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::SingularMatrix: return "singular matrix";
    case ErrorKind::TooManyFailures: return "too many failures";
  }
  return "unknown";
}

/// Every failure raised by the library. The kind is stable and is what the
/// CLI maps onto exit codes (InvalidArgument -> 2, everything else -> 3).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace sino2d
