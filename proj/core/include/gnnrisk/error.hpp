#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gnnrisk {

enum class ErrorKind {
  InvalidParameter,
  DimensionMismatch,
  NotSymmetric,
  SingularSystem,
  GenerationFailure,
  IoError,
  ConfigError,
  UsageError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. The kind is what callers branch on;
/// the message is for humans.
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

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace gnnrisk
