#pragma once

#include <stdexcept>
#include <string>

namespace esslab {

/// Failure categories. The CLI maps kUsage to exit code 2 and everything
/// else to 3.
enum class ErrorKind {
  kUsage,
  kDomain,         // argument outside the mathematical domain (|alpha| > 1, ...)
  kKindMismatch,   // line vs circle, Jacobi vs CMV
  kEmptySet,
  kIndex,
  kWindow,
  kSupport,
  kNumeric,        // root bracketing, non-convergence, resolution failures
  kUnsupported,
  kParse,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace esslab
