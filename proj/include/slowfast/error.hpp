#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slowfast {

enum class ErrorKind {
  InvalidParameter,
  NonFiniteField,
  NoBracket,
  OutOfChart,
  SingularLog,
  BlowUp,
  OracleMismatch,
  MalformedTrajectory,
  InsufficientData,
  NoTransitionInRange,
  NotFoundWithinBudget,
  IncompleteSummary,
  ConfigError,
  IoError,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::SingularLog: return "SingularLog";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::OracleMismatch: return "OracleMismatch";
    case ErrorKind::MalformedTrajectory: return "MalformedTrajectory";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NoTransitionInRange: return "NoTransitionInRange";
    case ErrorKind::NotFoundWithinBudget: return "NotFoundWithinBudget";
    case ErrorKind::IncompleteSummary: return "IncompleteSummary";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Blow-up of the closed-form transcritical solution: the denominator
/// 1 - x0*I(t) reaches zero somewhere inside [t_low, t_high].
class BlowUpError : public Error {
 public:
  BlowUpError(double t_low, double t_high)
      : Error(ErrorKind::BlowUp, "closed-form solution blows up in [" +
                                     std::to_string(t_low) + ", " +
                                     std::to_string(t_high) + "]"),
        t_low_(t_low),
        t_high_(t_high) {}

  [[nodiscard]] double t_low() const noexcept { return t_low_; }
  [[nodiscard]] double t_high() const noexcept { return t_high_; }

 private:
  double t_low_;
  double t_high_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace slowfast
