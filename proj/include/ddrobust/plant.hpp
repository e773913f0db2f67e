#pragma once

#include <cstdint>

#include "ddrobust/behavioral.hpp"
#include "ddrobust/linalg.hpp"

namespace ddrobust {

/// Discrete-time LTI plant x+ = A x + B u, y = C x + D u in minimal form.
/// Used to generate data and as a ground-truth oracle; the controller never
/// sees these matrices.
class LtiSystem {
 public:
  /// Throws Dimension on inconsistent shapes, Uncontrollable / Unobservable
  /// when the realization is not minimal.
  LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d,
            double rel_tol = kDefaultRankTolerance);

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& d() const { return d_; }

  Index states() const { return a_.rows(); }
  Index inputs() const { return b_.cols(); }
  Index outputs() const { return c_.rows(); }

 private:
  Matrix a_, b_, c_, d_;
};

struct SimulationRun {
  Matrix y;            // p x T
  Vector final_state;  // x_T
};

/// Output sequence for inputs `u_seq` (m x T) from initial state x0.
Matrix simulate(const LtiSystem& sys, const Vector& x0, const Matrix& u_seq);

/// Like simulate, also returning the state after the last step.
SimulationRun simulate_run(const LtiSystem& sys, const Vector& x0, const Matrix& u_seq);

/// [C; CA; ...; CA^{steps-1}]
Matrix observability_matrix(const Matrix& a, const Matrix& c, Index steps);
/// [B, AB, ..., A^{steps-1}B]
Matrix controllability_matrix(const Matrix& a, const Matrix& b, Index steps);

/// Smallest l with rank of the l-step observability matrix equal to n.
Index lag(const LtiSystem& sys, double rel_tol = kDefaultRankTolerance);
/// Same check on a raw (A, C) pair; throws Unobservable if no l <= n works.
Index lag(const Matrix& a, const Matrix& c, double rel_tol = kDefaultRankTolerance);

struct GeneratedTrajectory {
  TrajectoryData data;
  Vector initial_state;
  Vector final_state;
};

/// Historical experiment: inputs i.i.d. uniform[-amplitude, amplitude], x0
/// with standard normal entries, both from one mt19937_64 seeded with `seed`
/// (x0 is drawn first).
GeneratedTrajectory generate_historical(const LtiSystem& sys, Index length,
                                        double amplitude, std::uint64_t seed);

/// Uniform[-amplitude, amplitude] input block of size m x length.
Matrix random_inputs(Index m, Index length, double amplitude, std::uint64_t seed);

/// The third-order example plant (D = 0) used throughout the experiments.
LtiSystem reference_plant();

}  // namespace ddrobust
