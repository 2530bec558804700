#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tripipe {

enum class ErrorKind {
  malformed_line,
  self_loop,
  invalid_spec,
  invalid_config,
  io_failure,
  protocol_violation,
  bound_exceeded,
  deadlock,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_line: return "MalformedLine";
    case ErrorKind::self_loop: return "SelfLoop";
    case ErrorKind::invalid_spec: return "InvalidSpec";
    case ErrorKind::invalid_config: return "InvalidConfig";
    case ErrorKind::io_failure: return "IoFailure";
    case ErrorKind::protocol_violation: return "ProtocolViolation";
    case ErrorKind::bound_exceeded: return "BoundExceeded";
    case ErrorKind::deadlock: return "Deadlock";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line()` is non-zero only for the
/// two parse errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail, std::size_t line = 0)
      : std::runtime_error(format(kind, detail, line)), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

  /// Input and usage problems, as opposed to engine invariant failures.
  bool is_input_error() const noexcept {
    switch (kind_) {
      case ErrorKind::malformed_line:
      case ErrorKind::self_loop:
      case ErrorKind::invalid_spec:
      case ErrorKind::invalid_config:
      case ErrorKind::io_failure:
        return true;
      default:
        return false;
    }
  }

 private:
  static std::string format(ErrorKind kind, const std::string& detail, std::size_t line) {
    std::string out(to_string(kind));
    if (line != 0) {
      out += ' ';
      out += std::to_string(line);
    }
    if (!detail.empty()) {
      out += ": ";
      out += detail;
    }
    return out;
  }

  ErrorKind kind_;
  std::size_t line_;
};

}  // namespace tripipe
