#include <gtest/gtest.h>

#include "ddrobust/noise.hpp"
#include "support.hpp"

using namespace ddrobust;
using namespace testing_support;

namespace {

constexpr Index kPast = 4;
constexpr Index kFuture = 20;

Scenario example(std::uint64_t seed = 3) {
  return make_scenario(reference_plant(), kPast, kFuture, 100, seed);
}

// A_w by the congruence [1; w] = T [1; g_w] applied to the full Phi.
Matrix congruence_oracle(const NoiseModel& noise, const Vector& w0, const Matrix& ym) {
  const Index nw = ym.cols();
  Matrix t = Matrix::Zero(w0.size() + 1, nw + 1);
  t(0, 0) = 1.0;
  t.block(1, 0, w0.size(), 1) = w0;
  t.bottomRightCorner(w0.size(), nw) = -ym;
  return t.transpose() * noise.full() * t;
}

double residual_to_range(const HankelPartition& part, const Vector& u, const Vector& y) {
  const Matrix stack = part.initial_stack();
  Vector rhs(stack.rows());
  rhs << u, y;
  const Vector g = stack.completeOrthogonalDecomposition().solve(rhs);
  return (stack * g - rhs).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(NoiseModel, EnergyBoundValues) {
  const NoiseModel model = NoiseModel::energy_bound(0.001, 4, 1);
  EXPECT_DOUBLE_EQ(model.phi11(), 4 * 1 * 0.001);
  EXPECT_EQ(model.phi12(), Vector::Zero(4));
  EXPECT_EQ(model.phi22(), -Matrix::Identity(4, 4));
  const Vector w = Vector::Constant(4, 0.01);
  EXPECT_NEAR(model.evaluate(w), 0.004 - 4e-4, 1e-15);
  const Matrix full = model.full();
  EXPECT_LT((full - full.transpose()).norm(), 1e-15);
}

TEST(NoiseModel, RejectsIndefinitePhi22) {
  EXPECT_ERROR_KIND(NoiseModel(1.0, Vector::Zero(2), Matrix::Identity(2, 2)),
                    ErrorKind::InvalidArgument);
  Matrix asym(2, 2);
  asym << -1, 0.5, 0, -1;
  EXPECT_ERROR_KIND(NoiseModel(1.0, Vector::Zero(2), asym), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(NoiseModel::energy_bound(-1.0, 4, 1), ErrorKind::InvalidArgument);
}

TEST(Parameterization, Invariants) {
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  const NoiseParameterization param =
      build_parameterization(s.part, s.u_ini, s.y_ini, noise);
  const Matrix& up = s.part.u_past;
  const Matrix& m = param.kernel;
  EXPECT_EQ(m.cols(), s.part.columns() - kPast);
  EXPECT_LT((up * m).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((m.transpose() * m - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff(),
            1e-12);
  // Minimum-norm particular solution U_p^T (U_p U_p^T)^{-1} u_ini.
  const Vector g_star = up.transpose() * (up * up.transpose()).ldlt().solve(s.u_ini);
  EXPECT_LT((param.g_star - g_star).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((param.w0 - (s.y_ini - s.part.y_past * g_star)).cwiseAbs().maxCoeff(), 1e-10);

  const Matrix oracle = congruence_oracle(noise, param.w0, s.part.y_past * m);
  EXPECT_LT((param.constraint - oracle).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((param.constraint - param.constraint.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Index nw = m.cols();
  const Matrix lower = param.constraint.bottomRightCorner(nw, nw);
  EXPECT_LT((lower - m.transpose() * s.part.y_past.transpose() * noise.phi22() *
                         s.part.y_past * m)
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  EXPECT_LE(max_eigenvalue(lower), 1e-10);
  // The whitened basis spans row(Y_p M), which has dimension n for this plant.
  EXPECT_EQ(param.reduced_dimension(), 3);
  const Matrix whitened = -param.basis.transpose() * lower * param.basis;
  EXPECT_LT((whitened - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(param.shape(), NoiseSetShape::Ellipsoid);
}

TEST(Parameterization, ZeroWindowTopLeftIsPhi11) {
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(2e-3, kPast, 1);
  const auto param = build_parameterization(s.part, Vector::Zero(4), Vector::Zero(4), noise);
  EXPECT_EQ(param.w0, Vector::Zero(4));
  EXPECT_DOUBLE_EQ(param.constraint(0, 0), noise.phi11());
}

TEST(Parameterization, ExactWindowAdmitsZeroNoise) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  // w = 0 <=> Y_p M g_w = w0, solvable because y_ini is exact.
  const Vector g = param.noise_map.completeOrthogonalDecomposition().solve(param.w0);
  EXPECT_LE(noise_from_gw(param, g).norm(), 1e-8);
  EXPECT_TRUE(is_feasible_gw(param, g));
}

TEST(NoiseFromGw, ZeroAndDegenerateDirections) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  EXPECT_EQ(noise_from_gw(param, Vector::Zero(param.free_dimension())), param.w0);
  const Matrix flat = null_space(param.noise_map);
  ASSERT_GT(flat.cols(), 0);
  std::mt19937_64 rng(2);
  const Vector g = flat * gaussian(flat.cols(), rng) * 100.0;
  EXPECT_LT((noise_from_gw(param, g) - param.w0).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_ERROR_KIND(noise_from_gw(param, Vector::Zero(3)), ErrorKind::Dimension);
}

TEST(NoiseFromGw, AnyParameterGivesConsistentWindow) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector g = gaussian(param.free_dimension(), rng);
    const Vector w = noise_from_gw(param, g);
    EXPECT_LT(residual_to_range(s.part, s.u_ini, s.y_ini - w), 1e-8);
  }
}

TEST(IsFeasible, OriginFollowsNoiseBoundAtW0) {
  std::mt19937_64 rng(4);
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector y = s.y_ini + 0.03 * gaussian(4, rng);
    const auto param = build_parameterization(s.part, s.u_ini, y, noise);
    const Vector zero = Vector::Zero(param.free_dimension());
    if (noise.evaluate(param.w0) >= 0.0) {
      EXPECT_TRUE(is_feasible_gw(param, zero));
    }
    EXPECT_NEAR(constraint_value(param, zero), noise.evaluate(param.w0), 1e-12);
  }
}

TEST(IsFeasible, BoundaryPointEvaluatesToZero) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  const double radius = std::sqrt(param.radius_sq);
  for (Index i = 0; i < param.reduced_dimension(); ++i) {
    Vector z = param.center;
    z(i) += radius;
    EXPECT_NEAR(constraint_value(param, param.basis * z), 0.0, 1e-8);
  }
}

TEST(IsFeasible, FarAlongCurvedDirectionIsInfeasible) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  const Index nw = param.free_dimension();
  const Vector d = param.basis.col(0);
  ASSERT_LT(d.dot(param.constraint.bottomRightCorner(nw, nw) * d), 0.0);
  EXPECT_FALSE(is_feasible_gw(param, 1e3 * d));
}

TEST(Sampling, SamplesAreFeasibleAndConsistent) {
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  std::mt19937_64 rng(15);
  const Vector y = s.y_ini + 0.02 * gaussian(4, rng);
  const auto param = build_parameterization(s.part, s.u_ini, y, noise);
  const auto samples = sample_feasible_gw(param, 200, 5);
  ASSERT_EQ(samples.size(), 200u);
  for (const Vector& g : samples) {
    EXPECT_TRUE(is_feasible_gw(param, g));
    const Vector w = noise_from_gw(param, g);
    EXPECT_GE(noise.evaluate(w), -1e-8);
    EXPECT_LT(residual_to_range(s.part, s.u_ini, y - w), 1e-8);
  }
}

TEST(Sampling, EmptyCountAndDeterminism) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  EXPECT_TRUE(sample_feasible_gw(param, 0, 1).empty());
  const auto a = sample_feasible_gw(param, 5, 77);
  const auto b = sample_feasible_gw(param, 5, 77);
  const auto c = sample_feasible_gw(param, 5, 78);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(a[0], c[0]);
}

TEST(Sampling, FillsTheBallUniformly) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(1e-3, kPast, 1));
  const Index r = param.reduced_dimension();
  const auto samples = sample_feasible_gw(param, 4000, 3);
  // Uniform in an r-ball: P(|z - c| <= rho / 2) = 2^-r.
  int inner = 0;
  const Matrix project = param.basis.completeOrthogonalDecomposition().pseudoInverse();
  for (const Vector& g : samples) {
    const double t = (project * g - param.center).norm() / std::sqrt(param.radius_sq);
    EXPECT_LE(t, 1.0 + 1e-9);
    if (t <= 0.5) ++inner;
  }
  const double expected = 4000.0 * std::pow(0.5, static_cast<double>(r));
  EXPECT_NEAR(inner, expected, 4.0 * std::sqrt(expected));
}

TEST(Sampling, EmptySetIsInfeasible) {
  const Scenario s = example();
  Vector y = s.y_ini;
  y(2) += 1.0;  // far outside a bound of energy 4e-8
  const auto param = build_parameterization(s.part, s.u_ini, y,
                                            NoiseModel::energy_bound(1e-8, kPast, 1));
  EXPECT_EQ(param.shape(), NoiseSetShape::Empty);
  EXPECT_ERROR_KIND(sample_feasible_gw(param, 3, 1), ErrorKind::Infeasible);
}

TEST(Sampling, PointSetReturnsCenter) {
  const Scenario s = example();
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini,
                                            NoiseModel::energy_bound(0.0, kPast, 1));
  EXPECT_EQ(param.shape(), NoiseSetShape::Point);
  for (const Vector& g : sample_feasible_gw(param, 3, 1)) {
    EXPECT_LT(noise_from_gw(param, g).norm(), 1e-8);
  }
}

TEST(Parameterization, Errors) {
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  // Constant input: U_p loses rank.
  const TrajectoryData flat(Matrix::Ones(1, 100), s.hist.data.y);
  const HankelPartition bad = partition(flat, {kPast, kFuture});
  EXPECT_ERROR_KIND(build_parameterization(bad, s.u_ini, s.y_ini, noise),
                    ErrorKind::PersistentExcitation);
  // N_c = m * T_ini: U_p is square and invertible, so its kernel is trivial.
  const TrajectoryData short_data(s.hist.data.u.leftCols(8), s.hist.data.y.leftCols(8));
  const HankelPartition square = partition(short_data, {kPast, 1});
  EXPECT_ERROR_KIND(build_parameterization(square, s.u_ini, s.y_ini, noise),
                    ErrorKind::DegenerateKernel);
}

// Feasible noises built from the state-space model are recovered by some g_w.
TEST(Parameterization, CompletenessOnPerturbedStates) {
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini, noise);
  const LtiSystem& sys = s.sys;
  const StateSpacePredictor ss = state_space_predictor(sys, kPast);
  // State at the start of the recent window.
  const Vector x_start =
      ss.obs.completeOrthogonalDecomposition().solve(s.y_ini - ss.toeplitz * s.u_ini);
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Vector dx = 0.02 * gaussian(3, rng);
    const Vector y_consistent = ss.obs * (x_start + dx) + ss.toeplitz * s.u_ini;
    const Vector w = s.y_ini - y_consistent;
    if (noise.evaluate(w) < 0.0) continue;
    ++checked;
    const Vector g = param.noise_map.completeOrthogonalDecomposition().solve(param.w0 - w);
    EXPECT_LT((noise_from_gw(param, g) - w).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE(is_feasible_gw(param, g));
  }
  EXPECT_GT(checked, 5);
}

TEST(Parameterization, EnergyInterpretation) {
  const Scenario s = example();
  const NoiseModel noise = NoiseModel::energy_bound(1e-3, kPast, 1);
  std::mt19937_64 rng(10);
  const auto param = build_parameterization(s.part, s.u_ini, s.y_ini + 0.01 * gaussian(4, rng),
                                            noise);
  const Matrix project = param.basis;
  for (int trial = 0; trial < 200; ++trial) {
    const Vector z = param.center + 0.1 * gaussian(param.reduced_dimension(), rng);
    const Vector g = project * z;
    const Vector w = noise_from_gw(param, g);
    const double slack = noise.phi11() - w.squaredNorm();
    if (std::abs(slack) < 1e-9) continue;
    EXPECT_EQ(is_feasible_gw(param, g, 0.0), slack >= 0.0);
  }
  for (const Vector& g : sample_feasible_gw(param, 50, 3)) {
    EXPECT_LE(noise_from_gw(param, g).squaredNorm(), noise.phi11() + 1e-8);
  }
}
