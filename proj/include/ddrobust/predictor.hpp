#pragma once

#include <vector>

#include "ddrobust/behavioral.hpp"
#include "ddrobust/noise.hpp"

namespace ddrobust {

/// Finite-horizon tracking cost sum_k |y_k - r_k|_Q^2 + |u_k|_R^2.
class TrackingProblem {
 public:
  /// Q (p x p) and R (m x m) must be symmetric positive semidefinite.
  TrackingProblem(Vector reference, Matrix q, Matrix r, Index horizon);

  /// Zero reference.
  static TrackingProblem regulation(Matrix q, Matrix r, Index horizon);

  const Vector& reference() const { return reference_; }
  const Matrix& q() const { return q_; }
  const Matrix& r() const { return r_; }
  /// I_{T_e} kron Q
  const Matrix& q_bar() const { return q_bar_; }
  /// I_{T_e} kron R
  const Matrix& r_bar() const { return r_bar_; }
  Index horizon() const { return horizon_; }

 private:
  Vector reference_;
  Matrix q_, r_, q_bar_, r_bar_;
  Index horizon_;
};

struct RowSelection {
  std::vector<Index> selected;  // rows of Y_p kept in Y_p1, ascending
  Matrix lambda;                // [U_p; Y_p1; U_f]
};

/// Greedy scan of the rows of Y_p in natural order, keeping those that enlarge
/// the row space spanned by [U_p; U_f] and the rows kept so far.
RowSelection select_rows(const HankelPartition& part,
                         double rel_tol = kDefaultRankTolerance);

/// Affine output map y = B_u u + B_w g_w + y0 over the future window.
struct OutputPredictor {
  std::vector<Index> selected_rows;
  Matrix lambda;
  Matrix b_ini;  // p*T_e x N_c
  Matrix b_u;    // p*T_e x m*T_e
  Matrix b_w;    // p*T_e x n_w
  Vector y0;     // p*T_e
  double gram_condition = 0.0;  // cond(Lambda Lambda^T)
};

inline constexpr double kGramConditionWarning = 1e12;

OutputPredictor build_predictor(const HankelPartition& part, const RowSelection& rows,
                                const NoiseParameterization& param,
                                double rel_tol = kDefaultRankTolerance);

Vector predict(const OutputPredictor& pred, const Vector& u, const Vector& g_w);

double lqte(const TrackingProblem& prob, const Vector& u, const Vector& y);

/// Quadratic form in [1; g_w] whose nonnegativity is LQTE(u, g_w) <= gamma.
Matrix build_qg(const OutputPredictor& pred, const TrackingProblem& prob,
                const Vector& u, double gamma);

}  // namespace ddrobust
