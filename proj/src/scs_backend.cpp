#include "ddrobust/scs_backend.hpp"

#include <cmath>
#include <vector>

#include "ddrobust/error.hpp"

extern "C" {
#include "scs.h"
}

namespace ddrobust {

namespace {

// SCS stores a symmetric k x k block as its lower triangle, column by column,
// with off-diagonal entries scaled by sqrt(2).
std::vector<double> svec(const Matrix& s) {
  const Index k = s.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k * (k + 1) / 2));
  for (Index j = 0; j < k; ++j) {
    out.push_back(s(j, j));
    for (Index i = j + 1; i < k; ++i) out.push_back(M_SQRT2 * 0.5 * (s(i, j) + s(j, i)));
  }
  return out;
}

SolverStatus map_status(scs_int flag) {
  switch (flag) {
    case SCS_SOLVED: return SolverStatus::Optimal;
    case SCS_INFEASIBLE:
    case SCS_INFEASIBLE_INACCURATE: return SolverStatus::Infeasible;
    case SCS_UNBOUNDED:
    case SCS_UNBOUNDED_INACCURATE: return SolverStatus::Unbounded;
    default: return SolverStatus::NumericalFailure;
  }
}

}  // namespace

SdpSolution ScsBackend::solve(const LmiProblem& problem, const SdpSettings& settings) const {
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

  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) cols[j] = svec(problem.coefficients[static_cast<std::size_t>(j)]);

  std::vector<scs_float> values;
  std::vector<scs_int> rows;
  std::vector<scs_int> colptr{0};
  for (Index j = 0; j < n; ++j) {
    for (Index r = 0; r < lin; ++r) {
      if (problem.nonnegative[static_cast<std::size_t>(r)] == j) {
        values.push_back(-1.0);
        rows.push_back(static_cast<scs_int>(r));
      }
    }
    const auto& col = cols[static_cast<std::size_t>(j)];
    for (Index r = 0; r < psd; ++r) {
      const double v = col[static_cast<std::size_t>(r)];
      if (v != 0.0) {
        values.push_back(-v);
        rows.push_back(static_cast<scs_int>(lin + r));
      }
    }
    colptr.push_back(static_cast<scs_int>(values.size()));
  }

  ScsMatrix a_mat{values.data(), rows.data(), colptr.data(), static_cast<scs_int>(m),
                  static_cast<scs_int>(n)};
  std::vector<double> c(problem.objective.data(), problem.objective.data() + n);
  ScsData data{static_cast<scs_int>(m), static_cast<scs_int>(n), &a_mat, nullptr, b.data(),
               c.data()};

  scs_int psd_size = static_cast<scs_int>(k);
  ScsCone cone{};
  cone.l = static_cast<scs_int>(lin);
  cone.s = &psd_size;
  cone.ssize = 1;

  ScsSettings stgs;
  scs_set_default_settings(&stgs);
  stgs.eps_abs = settings.tolerance;
  stgs.eps_rel = settings.tolerance;
  stgs.max_iters = static_cast<scs_int>(settings.max_iterations);
  stgs.verbose = settings.verbose ? 1 : 0;
  if (settings.time_limit_seconds > 0.0) stgs.time_limit_secs = settings.time_limit_seconds;

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> y(static_cast<std::size_t>(m), 0.0);
  std::vector<double> s(static_cast<std::size_t>(m), 0.0);
  ScsSolution sol{x.data(), y.data(), s.data()};
  ScsInfo info{};
  const scs_int flag = scs(&data, &cone, &stgs, &sol, &info);

  SdpSolution out;
  out.status = map_status(flag);
  out.x = Eigen::Map<const Vector>(x.data(), n);
  out.objective = info.pobj;
  out.iterations = info.iter;
  out.detail = std::string("scs: ") + info.status;
  return out;
}

}  // namespace ddrobust
