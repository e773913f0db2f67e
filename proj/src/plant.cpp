#include "ddrobust/plant.hpp"

#include <random>
#include <string>

#include "ddrobust/error.hpp"

namespace ddrobust {

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d, double rel_tol)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const Index n = a_.rows();
  if (n < 1 || a_.cols() != n) throw Error(ErrorKind::Dimension, "A must be square and non-empty");
  if (b_.rows() != n || b_.cols() < 1) throw Error(ErrorKind::Dimension, "B must have n rows");
  if (c_.cols() != n || c_.rows() < 1) throw Error(ErrorKind::Dimension, "C must have n columns");
  if (d_.size() == 0) d_ = Matrix::Zero(c_.rows(), b_.cols());
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) {
    throw Error(ErrorKind::Dimension, "D must be p x m");
  }
  if (numerical_rank(controllability_matrix(a_, b_, n), rel_tol) != n) {
    throw Error(ErrorKind::Uncontrollable, "(A, B) is not controllable");
  }
  if (numerical_rank(observability_matrix(a_, c_, n), rel_tol) != n) {
    throw Error(ErrorKind::Unobservable, "(A, C) is not observable");
  }
}

SimulationRun simulate_run(const LtiSystem& sys, const Vector& x0, const Matrix& u_seq) {
  expect_size(x0.size(), sys.states(), "x0");
  expect_size(u_seq.rows(), sys.inputs(), "input channels");
  SimulationRun run;
  run.y.resize(sys.outputs(), u_seq.cols());
  Vector x = x0;
  for (Index k = 0; k < u_seq.cols(); ++k) {
    run.y.col(k) = sys.c() * x + sys.d() * u_seq.col(k);
    x = sys.a() * x + sys.b() * u_seq.col(k);
  }
  run.final_state = std::move(x);
  return run;
}

Matrix simulate(const LtiSystem& sys, const Vector& x0, const Matrix& u_seq) {
  return simulate_run(sys, x0, u_seq).y;
}

Matrix observability_matrix(const Matrix& a, const Matrix& c, Index steps) {
  Matrix obs(c.rows() * steps, a.cols());
  Matrix block = c;
  for (Index k = 0; k < steps; ++k) {
    obs.middleRows(k * c.rows(), c.rows()) = block;
    block = block * a;
  }
  return obs;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b, Index steps) {
  Matrix ctrb(a.rows(), b.cols() * steps);
  Matrix block = b;
  for (Index k = 0; k < steps; ++k) {
    ctrb.middleCols(k * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return ctrb;
}

Index lag(const Matrix& a, const Matrix& c, double rel_tol) {
  const Index n = a.rows();
  for (Index l = 1; l <= n; ++l) {
    if (numerical_rank(observability_matrix(a, c, l), rel_tol) == n) return l;
  }
  throw Error(ErrorKind::Unobservable, "no observability index <= n: (A, C) unobservable");
}

Index lag(const LtiSystem& sys, double rel_tol) { return lag(sys.a(), sys.c(), rel_tol); }

GeneratedTrajectory generate_historical(const LtiSystem& sys, Index length,
                                        double amplitude, std::uint64_t seed) {
  if (length < 1) throw Error(ErrorKind::InvalidArgument, "data length must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x0(sys.states());
  for (Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);

  Matrix u = Matrix::Zero(sys.inputs(), length);
  if (amplitude > 0.0) {
    std::uniform_real_distribution<double> uniform(-amplitude, amplitude);
    for (Index k = 0; k < length; ++k) {
      for (Index i = 0; i < u.rows(); ++i) u(i, k) = uniform(rng);
    }
  }
  auto run = simulate_run(sys, x0, u);
  return {TrajectoryData(std::move(u), std::move(run.y)), std::move(x0),
          std::move(run.final_state)};
}

Matrix random_inputs(Index m, Index length, double amplitude, std::uint64_t seed) {
  Matrix u = Matrix::Zero(m, length);
  if (amplitude <= 0.0) return u;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-amplitude, amplitude);
  for (Index k = 0; k < length; ++k) {
    for (Index i = 0; i < m; ++i) u(i, k) = uniform(rng);
  }
  return u;
}

LtiSystem reference_plant() {
  Matrix a(3, 3);
  // clang-format off
  a <<  0.8768,  0.4147,  0.0678,
        0.3934, -0.6436, -0.2961,
       -0.7907,  0.7055,  0.1587;
  // clang-format on
  Matrix b(3, 1);
  b << 0.9567, 0.1039, -0.2155;
  Matrix c(1, 3);
  c << 0.4164, -0.7185, -0.9618;
  return LtiSystem(a, b, c, Matrix::Zero(1, 1));
}

}  // namespace ddrobust
