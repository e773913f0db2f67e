#include <gtest/gtest.h>

#include "ddrobust/behavioral.hpp"
#include "ddrobust/plant.hpp"
#include "support.hpp"

using namespace ddrobust;
using namespace testing_support;

TEST(Simulate, ZeroStateZeroInput) {
  const LtiSystem sys = reference_plant();
  EXPECT_EQ(simulate(sys, Vector::Zero(3), Matrix::Zero(1, 8)), Matrix::Zero(1, 8));
}

TEST(Simulate, SingleStep) {
  std::mt19937_64 rng(1);
  const LtiSystem sys = random_system(3, 2, 2, rng);
  const Vector x0 = gaussian(3, rng);
  const Matrix u = gaussian(2, 1, rng);
  const Matrix y = simulate(sys, x0, u);
  EXPECT_LT((y.col(0) - (sys.c() * x0 + sys.d() * u.col(0))).norm(), 1e-14);
}

TEST(Simulate, ReferencePlantMatchesRecursion) {
  const LtiSystem sys = reference_plant();
  std::mt19937_64 rng(8);
  const Vector x0 = gaussian(3, rng);
  const Matrix u = uniform(1, 60, 1.0, rng);
  const Matrix expected = recursion(sys.a(), sys.b(), sys.c(), sys.d(), x0, u);
  EXPECT_LT((simulate(sys, x0, u) - expected).cwiseAbs().maxCoeff(), 1e-12);
  const SimulationRun run = simulate_run(sys, x0, u);
  EXPECT_EQ(run.y, simulate(sys, x0, u));
  // Continuing from the final state equals simulating the concatenation.
  const Matrix more = uniform(1, 5, 1.0, rng);
  Matrix both(1, 65);
  both << u, more;
  EXPECT_LT((simulate(sys, run.final_state, more) - simulate(sys, x0, both).rightCols(5))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Simulate, DimensionMismatch) {
  EXPECT_ERROR_KIND(simulate(reference_plant(), Vector::Zero(2), Matrix::Zero(1, 3)),
                    ErrorKind::Dimension);
  EXPECT_ERROR_KIND(simulate(reference_plant(), Vector::Zero(3), Matrix::Zero(2, 3)),
                    ErrorKind::Dimension);
}

TEST(Simulate, SuperpositionProperty) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const LtiSystem sys = random_system(1 + trial % 5, 1 + trial % 2, 1 + (trial / 2) % 2, rng);
    const Vector x0 = gaussian(sys.states(), rng);
    const Matrix u1 = gaussian(sys.inputs(), 15, rng);
    const Matrix u2 = gaussian(sys.inputs(), 15, rng);
    const Matrix lhs = simulate(sys, x0, u1 + u2);
    const Matrix rhs = simulate(sys, x0, u1) + simulate(sys, Vector::Zero(sys.states()), u2);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Lag, ScalarSystem) {
  const LtiSystem sys(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                      Matrix());
  EXPECT_EQ(lag(sys), 1);
}

TEST(Lag, ReferencePlantIsThree) {
  const LtiSystem sys = reference_plant();
  // Oracle: smallest l with rank [C; CA; ...; CA^{l-1}] = n by pivoted QR.
  Index expected = 0;
  Matrix obs(0, 3);
  Matrix power = Matrix::Identity(3, 3);
  for (Index l = 1; l <= 3 && expected == 0; ++l) {
    obs.conservativeResize(l, 3);
    obs.row(l - 1) = sys.c() * power;
    power = sys.a() * power;
    if (qr_rank(obs) == 3) expected = l;
  }
  EXPECT_EQ(expected, 3);
  EXPECT_EQ(lag(sys), expected);
}

TEST(Lag, UnobservablePair) {
  EXPECT_ERROR_KIND(lag(reference_plant().a(), Matrix::Zero(1, 3)), ErrorKind::Unobservable);
  EXPECT_ERROR_KIND(LtiSystem(reference_plant().a(), reference_plant().b(), Matrix::Zero(1, 3),
                              Matrix()),
                    ErrorKind::Unobservable);
}

TEST(Lag, MultiOutputCanBeShorter) {
  // Two outputs reading x1 and x2 of a 3-state chain: lag 2.
  Matrix a(3, 3);
  a << 0.5, 1, 0, 0, 0.4, 1, 0, 0, 0.3;
  Matrix c(2, 3);
  c << 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(lag(a, c), 2);
}

TEST(Lag, NeverExceedsOrderProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 5;
    const LtiSystem sys = random_system(n, 1 + trial % 2, 1 + (trial / 3) % 2, rng);
    const Index l = lag(sys);
    EXPECT_GE(l, 1);
    EXPECT_LE(l, n);
  }
}

TEST(LtiSystem, RejectsUncontrollable) {
  Matrix a = Matrix::Identity(2, 2) * 0.5;
  Matrix b(2, 1);
  b << 1, 1;
  Matrix c(1, 2);
  c << 1, 0;
  EXPECT_ERROR_KIND(LtiSystem(a, b, c, Matrix()), ErrorKind::Uncontrollable);
}

TEST(LtiSystem, EmptyFeedthroughIsZero) {
  const LtiSystem sys = reference_plant();
  EXPECT_EQ(sys.d(), Matrix::Zero(1, 1));
  EXPECT_EQ(sys.states(), 3);
  EXPECT_EQ(sys.inputs(), 1);
  EXPECT_EQ(sys.outputs(), 1);
}

TEST(GenerateHistorical, ShapeAndInputRange) {
  const auto gen = generate_historical(reference_plant(), 100, 1.0, 5);
  EXPECT_EQ(gen.data.u.rows(), 1);
  EXPECT_EQ(gen.data.u.cols(), 100);
  EXPECT_EQ(gen.data.y.cols(), 100);
  EXPECT_LE(gen.data.u.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_GT(gen.data.u.cwiseAbs().maxCoeff(), 0.5);
  const LtiSystem sys = reference_plant();
  EXPECT_LT((gen.data.y - recursion(sys.a(), sys.b(), sys.c(), sys.d(), gen.initial_state,
                                    gen.data.u))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(GenerateHistorical, ZeroAmplitudeGivesFreeResponse) {
  const LtiSystem sys = reference_plant();
  const auto gen = generate_historical(sys, 30, 0.0, 5);
  EXPECT_EQ(gen.data.u, Matrix::Zero(1, 30));
  EXPECT_LT((gen.data.y - recursion(sys.a(), sys.b(), sys.c(), sys.d(), gen.initial_state,
                                    Matrix::Zero(1, 30)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_GT(gen.initial_state.norm(), 0.0);
}

TEST(GenerateHistorical, SameSeedSameData) {
  const auto a = generate_historical(reference_plant(), 50, 1.0, 99);
  const auto b = generate_historical(reference_plant(), 50, 1.0, 99);
  const auto c = generate_historical(reference_plant(), 50, 1.0, 100);
  EXPECT_EQ(a.data.u, b.data.u);
  EXPECT_EQ(a.data.y, b.data.y);
  EXPECT_EQ(a.initial_state, b.initial_state);
  EXPECT_NE(a.data.u, c.data.u);
}

TEST(GenerateHistorical, InvalidLength) {
  EXPECT_ERROR_KIND(generate_historical(reference_plant(), 0, 1.0, 1), ErrorKind::InvalidArgument);
}

TEST(GenerateHistorical, EveryWindowIsATrajectoryProperty) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial % 4;
    const LtiSystem sys = random_system(n, 1 + trial % 2, 1 + (trial / 2) % 2, rng);
    const Index past = n;
    const Index future = 3;
    const Index length = (sys.inputs() + 1) * (past + future + n) + 15;
    const auto gen = generate_historical(sys, length, 1.0, 500 + trial);
    const HankelPartition part = partition(gen.data, {past, future}, n);
    for (Index start = 0; start + past <= length; start += 7) {
      EXPECT_TRUE(is_trajectory(part, stack_columns(gen.data.u.middleCols(start, past)),
                                stack_columns(gen.data.y.middleCols(start, past)), 1e-8));
    }
  }
}
