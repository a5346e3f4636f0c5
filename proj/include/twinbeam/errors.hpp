#pragma once

#include <stdexcept>
#include <string>

namespace twinbeam {

/// Error categories. The C API maps each onto a stable status code.
enum class ErrorKind {
  invalid_argument,
  numerical_failure,
  truncation,
  undefined_q,
  undefined_fringe_count,
  inconsistent_widths,
  ambiguous_projection,
  config,
  io,
};

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

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace twinbeam
