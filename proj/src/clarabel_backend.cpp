#include "ddrobust/clarabel_backend.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ddrobust/error.hpp"
#include "ddrobust_clarabel.h"

namespace ddrobust {

namespace {

// Upper triangle, column by column, off-diagonal entries scaled by sqrt(2).
std::vector<double> svec(const Matrix& s) {
  const Index k = s.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k * (k + 1) / 2));
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < j; ++i) out.push_back(M_SQRT2 * 0.5 * (s(i, j) + s(j, i)));
    out.push_back(s(j, j));
  }
  return out;
}

SolverStatus map_status(int32_t code) {
  switch (code) {
    case DDR_SOLVED: return SolverStatus::Optimal;
    case DDR_PRIMAL_INFEASIBLE: return SolverStatus::Infeasible;
    case DDR_DUAL_INFEASIBLE: return SolverStatus::Unbounded;
    default: return SolverStatus::NumericalFailure;
  }
}

}  // namespace

SdpSolution ClarabelBackend::solve(const LmiProblem& problem, const SdpSettings& settings) const {
  const Index n = problem.variables();
  const Index k = problem.size();
  const Index lin = static_cast<Index>(problem.nonnegative.size());
  const Index psd = k * (k + 1) / 2;
  const Index m = lin + psd;
  if (static_cast<Index>(problem.coefficients.size()) != n) {
    throw Error(ErrorKind::Dimension, "one coefficient matrix per variable required");
  }

  // Rows: nonnegative slacks first, then the PSD block, s = b - A x.
  std::vector<double> b(static_cast<std::size_t>(m), 0.0);
  const auto b_psd = svec(problem.constant);
  std::copy(b_psd.begin(), b_psd.end(), b.begin() + lin);

  std::vector<double> values;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> colptr{0};
  for (Index j = 0; j < n; ++j) {
    for (Index r = 0; r < lin; ++r) {
      if (problem.nonnegative[static_cast<std::size_t>(r)] == j) {
        values.push_back(-1.0);
        rows.push_back(static_cast<std::size_t>(r));
      }
    }
    const auto col = svec(problem.coefficients[static_cast<std::size_t>(j)]);
    for (Index r = 0; r < psd; ++r) {
      const double v = col[static_cast<std::size_t>(r)];
      if (v != 0.0) {
        values.push_back(-v);
        rows.push_back(static_cast<std::size_t>(lin + r));
      }
    }
    colptr.push_back(values.size());
  }

  std::vector<double> q(problem.objective.data(), problem.objective.data() + n);
  const DdrClarabelProblem data{static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                                q.data(), colptr.data(), rows.data(), values.data(), b.data(),
                                static_cast<std::size_t>(lin), static_cast<std::size_t>(k)};
  const auto iterations = static_cast<uint32_t>(
      std::min<Index>(settings.max_iterations, std::numeric_limits<uint32_t>::max()));
  const DdrClarabelSettings config{settings.tolerance, iterations, settings.time_limit_seconds,
                                   settings.verbose ? 1 : 0};
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  DdrClarabelResult result{x.data(), 0.0, 0, {}};
  const int32_t code = ddr_clarabel_solve(&data, &config, &result);

  SdpSolution out;
  out.status = map_status(code);
  out.x = Eigen::Map<const Vector>(x.data(), n);
  out.objective = result.objective;
  out.iterations = result.iterations;
  out.detail = std::string("clarabel: ") + result.status_text;
  return out;
}

}  // namespace ddrobust
