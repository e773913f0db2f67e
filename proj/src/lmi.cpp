#include "ddrobust/lmi.hpp"

#include "ddrobust/error.hpp"

namespace ddrobust {

Matrix LmiProblem::evaluate(const Vector& x) const {
  expect_size(x.size(), variables(), "LMI variables");
  Matrix f = constant;
  for (Index i = 0; i < x.size(); ++i) f += x(i) * coefficients[static_cast<std::size_t>(i)];
  return f;
}

LmiProblem LmiProblem::congruence(const Matrix& t) const {
  expect_size(t.rows(), size(), "congruence rows");
  LmiProblem out;
  out.objective = objective;
  out.nonnegative = nonnegative;
  out.constant = symmetrize(t.transpose() * constant * t);
  out.coefficients.reserve(coefficients.size());
  for (const auto& f : coefficients) out.coefficients.push_back(symmetrize(t.transpose() * f * t));
  return out;
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::Infeasible: return "infeasible";
    case SolverStatus::Unbounded: return "unbounded";
    case SolverStatus::NumericalFailure: return "numerical_failure";
  }
  return "numerical_failure";
}

}  // namespace ddrobust
