#pragma once

#include <stdexcept>
#include <string>

namespace plapd {

enum class ErrorKind {
  invalid_parameter,
  invalid_domain,
  invalid_input,
};

/// Thrown on precondition violations. Numerical non-convergence is never an
/// exception; it is carried by the report types.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_domain: return "invalid-domain";
    case ErrorKind::invalid_input: return "invalid-input";
  }
  return "unknown";
}

/// Three-valued outcome of a numerical test that cannot prove a limit.
enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

}  // namespace plapd
