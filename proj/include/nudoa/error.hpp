#pragma once

#include <stdexcept>
#include <string>

namespace nudoa {

enum class ErrorKind {
  InvalidArgument,  // malformed inputs (shape mismatch, empty lists)
  Domain,           // value outside the admissible set (angle range, q >= M)
  Numeric,          // ill-conditioned or degenerate numerics
  Data,             // data violating a model precondition (non-PSD, zero diagonal)
  Config,           // scenario / benchmark configuration rejected
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace nudoa
