#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddrobust {

enum class ErrorKind {
  Dimension,
  PersistentExcitation,
  InconsistentInitialCondition,
  DegenerateKernel,
  Unobservable,
  Uncontrollable,
  Conditioning,
  CostDefiniteness,
  Infeasible,
  NumericalFailure,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Same kind, message prefixed with `stage: `.
  Error within(std::string_view stage) const {
    return Error(kind_, std::string(stage) + ": " + what());
  }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::PersistentExcitation: return "persistent-excitation";
    case ErrorKind::InconsistentInitialCondition: return "inconsistent-initial-condition";
    case ErrorKind::DegenerateKernel: return "degenerate-kernel";
    case ErrorKind::Unobservable: return "unobservable";
    case ErrorKind::Uncontrollable: return "uncontrollable";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::CostDefiniteness: return "cost-definiteness";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace ddrobust
