#pragma once

// Shared generators and independent oracles for the tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ddrobust/behavioral.hpp"
#include "ddrobust/error.hpp"
#include "ddrobust/noise.hpp"
#include "ddrobust/plant.hpp"
#include "ddrobust/predictor.hpp"

#define EXPECT_ERROR_KIND(statement, expected_kind)                        \
  do {                                                                      \
    try {                                                                   \
      statement;                                                            \
      ADD_FAILURE() << "expected " << ddrobust::to_string(expected_kind);   \
    } catch (const ddrobust::Error& e) {                                    \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                       \
    }                                                                       \
  } while (0)

namespace testing_support {

using ddrobust::Index;
using ddrobust::Matrix;
using ddrobust::Vector;

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  }
  return a;
}

inline Vector gaussian(Index n, std::mt19937_64& rng) { return gaussian(n, 1, rng).col(0); }

inline Matrix uniform(Index rows, Index cols, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = u(rng);
  }
  return a;
}

/// Rank by column-pivoted QR, independent of the SVD used in the library.
inline Index qr_rank(const Matrix& a, double rel_tol = 1e-9) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(rel_tol);
  return qr.rank();
}

/// x_{k+1} = A x_k + B u_k, y_k = C x_k + D u_k, written out step by step.
inline Matrix recursion(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                        Vector x, const Matrix& u) {
  Matrix y(c.rows(), u.cols());
  for (Index k = 0; k < u.cols(); ++k) {
    for (Index i = 0; i < c.rows(); ++i) {
      double acc = 0.0;
      for (Index j = 0; j < a.rows(); ++j) acc += c(i, j) * x(j);
      for (Index j = 0; j < u.rows(); ++j) acc += d(i, j) * u(j, k);
      y(i, k) = acc;
    }
    Vector next = Vector::Zero(x.size());
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.rows(); ++j) next(i) += a(i, j) * x(j);
      for (Index j = 0; j < u.rows(); ++j) next(i) += b(i, j) * u(j, k);
    }
    x = next;
  }
  return y;
}

/// Random controllable and observable system with spectral radius `radius`.
inline ddrobust::LtiSystem random_system(Index n, Index m, Index p, std::mt19937_64& rng,
                                         double radius = 0.95) {
  for (;;) {
    Matrix a = gaussian(n, n, rng);
    const double rho = Eigen::EigenSolver<Matrix>(a).eigenvalues().cwiseAbs().maxCoeff();
    if (rho < 1e-6) continue;
    a *= radius / rho;
    try {
      return ddrobust::LtiSystem(a, gaussian(n, m, rng), gaussian(p, n, rng), gaussian(p, m, rng));
    } catch (const ddrobust::Error&) {
    }
  }
}

/// Output of a state-space model over a horizon, as an affine map of the
/// stacked inputs: y = obs * x + toeplitz * u.
struct StateSpacePredictor {
  Matrix obs;
  Matrix toeplitz;
};

inline StateSpacePredictor state_space_predictor(const ddrobust::LtiSystem& sys, Index horizon) {
  const Index n = sys.states(), m = sys.inputs(), p = sys.outputs();
  StateSpacePredictor out{Matrix::Zero(p * horizon, n), Matrix::Zero(p * horizon, m * horizon)};
  Matrix power = Matrix::Identity(n, n);
  std::vector<Matrix> markov;  // C A^{k-1} B
  for (Index k = 0; k < horizon; ++k) {
    out.obs.block(k * p, 0, p, n) = sys.c() * power;
    markov.push_back(sys.c() * power * sys.b());
    power = sys.a() * power;
  }
  for (Index k = 0; k < horizon; ++k) {
    out.toeplitz.block(k * p, k * m, p, m) = sys.d();
    for (Index j = 0; j < k; ++j) out.toeplitz.block(k * p, j * m, p, m) = markov[k - j - 1];
  }
  return out;
}

/// Historical data, partition and an exact recent window for one system.
struct Scenario {
  ddrobust::LtiSystem sys;
  ddrobust::GeneratedTrajectory hist;
  ddrobust::HankelPartition part;
  Vector u_ini;
  Vector y_ini;     // exact
  Vector x_after;   // state at the start of the future window
};

inline Scenario make_scenario(const ddrobust::LtiSystem& sys, Index past, Index future,
                              Index length, std::uint64_t seed) {
  using namespace ddrobust;
  GeneratedTrajectory hist = generate_historical(sys, length, 1.0, seed);
  HankelPartition part = partition(hist.data, {past, future}, sys.states());
  Matrix u = random_inputs(sys.inputs(), past, 1.0, seed + 1000);
  SimulationRun run = simulate_run(sys, hist.final_state, u);
  return {sys, std::move(hist), std::move(part), stack_columns(u), stack_columns(run.y),
          run.final_state};
}

}  // namespace testing_support
