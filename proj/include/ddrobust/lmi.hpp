#pragma once

#include <string>
#include <vector>

#include "ddrobust/linalg.hpp"

namespace ddrobust {

/// Solver-neutral semidefinite program
///
///   minimize    objective^T x
///   subject to  constant + sum_i x_i coefficients[i]  is PSD,
///               x_i >= 0 for i in nonnegative.
struct LmiProblem {
  Vector objective;
  Matrix constant;
  std::vector<Matrix> coefficients;
  std::vector<Index> nonnegative;

  Index variables() const { return objective.size(); }
  Index size() const { return constant.rows(); }

  Matrix evaluate(const Vector& x) const;

  /// Same program on the congruent matrix t^T F(x) t. With t square and
  /// invertible this is an equivalent problem; with fewer columns it keeps
  /// only the restriction of F(x) to range(t).
  LmiProblem congruence(const Matrix& t) const;
};

enum class SolverStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(SolverStatus status);

struct SdpSettings {
  double tolerance = 1e-8;  // feasibility and duality-gap tolerance
  Index max_iterations = 200000;
  double time_limit_seconds = 0.0;  // 0 = unlimited
  bool verbose = false;
};

struct SdpSolution {
  SolverStatus status = SolverStatus::NumericalFailure;
  Vector x;
  double objective = 0.0;
  Index iterations = 0;
  std::string detail;
};

/// A conic solver able to handle one dense PSD block plus nonnegativity.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const LmiProblem& problem, const SdpSettings& settings) const = 0;
};

}  // namespace ddrobust
