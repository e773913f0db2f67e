#include <sstream>

#include <gtest/gtest.h>

#include "ddrobust/behavioral.hpp"
#include "ddrobust/plant.hpp"
#include "ddrobust/trajectory_io.hpp"
#include "support.hpp"

using namespace ddrobust;
using namespace testing_support;

namespace {

Matrix row(std::initializer_list<double> values) {
  Matrix m(1, static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) m(0, i++) = v;
  return m;
}

}  // namespace

TEST(BuildHankel, DepthTwo) {
  Matrix expected(2, 3);
  expected << 1, 2, 3, 2, 3, 4;
  EXPECT_EQ(build_hankel(row({1, 2, 3, 4}), 2), expected);
}

TEST(BuildHankel, FullDepthIsSingleColumn) {
  const Matrix h = build_hankel(row({1, 2, 3, 4}), 4);
  ASSERT_EQ(h.cols(), 1);
  EXPECT_EQ(h.col(0), Vector::LinSpaced(4, 1, 4));
}

TEST(BuildHankel, SizeForLongSequence) {
  const Matrix h = build_hankel(Matrix::Ones(1, 100), 24);
  EXPECT_EQ(h.rows(), 24);
  EXPECT_EQ(h.cols(), 77);
}

TEST(BuildHankel, DepthOutOfRange) {
  EXPECT_ERROR_KIND(build_hankel(row({1, 2, 3}), 0), ErrorKind::Dimension);
  EXPECT_ERROR_KIND(build_hankel(row({1, 2, 3}), 4), ErrorKind::Dimension);
}

TEST(BuildHankel, ShiftStructureProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index q = 1 + trial % 3;
    const Index len = 5 + trial % 17;
    const Index depth = 1 + trial % len;
    const Matrix seq = gaussian(q, len, rng);
    const Matrix h = build_hankel(seq, depth);
    ASSERT_EQ(h.rows(), q * depth);
    ASSERT_EQ(h.cols(), len - depth + 1);
    for (Index i = 0; i < depth; ++i) {
      for (Index j = 0; j < h.cols(); ++j) {
        ASSERT_EQ(h.block(i * q, j, q, 1), seq.col(i + j));
        if (i > 0 && j + 1 < h.cols()) {
          ASSERT_EQ(h.block(i * q, j, q, 1), h.block((i - 1) * q, j + 1, q, 1));
        }
      }
    }
  }
}

TEST(PersistentExcitation, ConstantSequenceFails) {
  EXPECT_FALSE(is_persistently_exciting(Matrix::Ones(1, 10), 2));
  EXPECT_TRUE(is_persistently_exciting(Matrix::Ones(1, 10), 1));
}

TEST(PersistentExcitation, RandomSequenceOrder27) {
  const Matrix u = random_inputs(1, 100, 1.0, 42);
  EXPECT_EQ(qr_rank(build_hankel(u, 27)), 27);
  EXPECT_TRUE(is_persistently_exciting(u, 27));
}

TEST(PersistentExcitation, TooManyRowsFails) {
  const Matrix u = random_inputs(2, 20, 1.0, 1);
  // 2 * 7 = 14 rows, 14 columns: fine; order 8 gives 16 rows for 13 columns.
  EXPECT_TRUE(is_persistently_exciting(u, 7));
  EXPECT_FALSE(is_persistently_exciting(u, 8));
}

TEST(PersistentExcitation, MonotoneInOrder) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Index m = 1 + trial % 2;
    const Index len = 20 + trial;
    const Matrix u = uniform(m, len, 1.0, rng);
    Index top = 0;
    for (Index order = 1; order <= len; ++order) {
      if (is_persistently_exciting(u, order)) top = order;
    }
    for (Index order = 1; order <= top; ++order) EXPECT_TRUE(is_persistently_exciting(u, order));
  }
}

TEST(Partition, BlockSizes) {
  const auto hist = generate_historical(reference_plant(), 100, 1.0, 3);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  EXPECT_EQ(part.u_past.rows(), 4);
  EXPECT_EQ(part.y_past.rows(), 4);
  EXPECT_EQ(part.u_future.rows(), 20);
  EXPECT_EQ(part.y_future.rows(), 20);
  EXPECT_EQ(part.columns(), 77);
  Matrix u_stack(24, 77);
  u_stack << part.u_past, part.u_future;
  EXPECT_EQ(u_stack, build_hankel(hist.data.u, 24));
  Matrix y_stack(24, 77);
  y_stack << part.y_past, part.y_future;
  EXPECT_EQ(y_stack, build_hankel(hist.data.y, 24));
}

TEST(Partition, Boundaries) {
  const TrajectoryData data(random_inputs(1, 10, 1.0, 1), random_inputs(1, 10, 1.0, 2));
  EXPECT_EQ(partition(data, {4, 6}).columns(), 1);
  EXPECT_ERROR_KIND(partition(data, {4, 7}), ErrorKind::Dimension);
  EXPECT_ERROR_KIND(partition(data, {0, 3}), ErrorKind::Dimension);
}

TEST(Partition, ChecksExcitationWhenOrderGiven) {
  const TrajectoryData data(Matrix::Ones(1, 100), Matrix::Ones(1, 100));
  EXPECT_NO_THROW(partition(data, {4, 20}));
  EXPECT_ERROR_KIND(partition(data, {4, 20}, 3), ErrorKind::PersistentExcitation);
}

TEST(IsTrajectory, WindowsOfDataPass) {
  const auto hist = generate_historical(reference_plant(), 100, 1.0, 5);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  for (Index start : {0, 17, 96}) {
    const Vector u = stack_columns(hist.data.u.middleCols(start, 4));
    const Vector y = stack_columns(hist.data.y.middleCols(start, 4));
    EXPECT_TRUE(is_trajectory(part, u, y, 1e-8));
  }
  EXPECT_TRUE(is_trajectory(part, Vector::Zero(4), Vector::Zero(4), 1e-12));
}

TEST(IsTrajectory, OrthogonalPerturbationFails) {
  const double tol = 1e-6;
  const auto hist = generate_historical(reference_plant(), 100, 1.0, 5);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  const Vector u = stack_columns(hist.data.u.middleCols(10, 4));
  const Vector y = stack_columns(hist.data.y.middleCols(10, 4));
  // Direction orthogonal to range([U_p; Y_p]).
  const Matrix stack = part.initial_stack();
  Eigen::JacobiSVD<Matrix> svd(stack, Eigen::ComputeFullU);
  const Index rank = qr_rank(stack);
  ASSERT_LT(rank, stack.rows());
  const Vector d = svd.matrixU().col(rank) * (10.0 * tol);
  EXPECT_FALSE(is_trajectory(part, u + d.head(4), y + d.tail(4), tol));
  EXPECT_TRUE(is_trajectory(part, u + 1e-4 * d.head(4), y + 1e-4 * d.tail(4), tol));
}

TEST(SimulateDdriven, ZeroTrajectory) {
  const auto hist = generate_historical(reference_plant(), 100, 1.0, 9);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  const Vector y = simulate_ddriven(part, Vector::Zero(4), Vector::Zero(4), Vector::Zero(20));
  EXPECT_LT(y.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SimulateDdriven, MatchesRecursionOnReferencePlant) {
  const LtiSystem sys = reference_plant();
  std::mt19937_64 rng(21);
  const auto hist = generate_historical(sys, 100, 1.0, 21);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  const Vector x0 = gaussian(3, rng);
  const Matrix u = uniform(1, 24, 1.0, rng);
  const Matrix y = recursion(sys.a(), sys.b(), sys.c(), sys.d(), x0, u);
  const Vector predicted = simulate_ddriven(part, stack_columns(u.leftCols(4)),
                                            stack_columns(y.leftCols(4)),
                                            stack_columns(u.rightCols(20)));
  EXPECT_LT((predicted - stack_columns(y.rightCols(20))).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SimulateDdriven, InconsistentInitialCondition) {
  const auto hist = generate_historical(reference_plant(), 100, 1.0, 9);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  Vector y = stack_columns(hist.data.y.middleCols(3, 4));
  y(0) += 0.5;
  EXPECT_ERROR_KIND(simulate_ddriven(part, stack_columns(hist.data.u.middleCols(3, 4)), y,
                                     Vector::Zero(20)),
                    ErrorKind::InconsistentInitialCondition);
}

// Different g solving the first three block rows give the same Y_f g.
TEST(SimulateDdriven, OutputIndependentOfChosenSolution) {
  const auto hist = generate_historical(reference_plant(), 100, 1.0, 23);
  const HankelPartition part = partition(hist.data, {4, 20}, 3);
  Matrix lhs(28, part.columns());
  lhs << part.u_past, part.y_past, part.u_future;
  std::mt19937_64 rng(23);
  const Vector g_true = gaussian(part.columns(), rng);
  const Vector rhs = lhs * g_true;
  const Vector g_min = lhs.completeOrthogonalDecomposition().solve(rhs);
  ASSERT_LT((lhs * g_min - rhs).norm(), 1e-8);
  EXPECT_LT((part.y_future * (g_true - g_min)).cwiseAbs().maxCoeff(), 1e-8);
  const Vector y = simulate_ddriven(part, rhs.head(4), rhs.segment(4, 4), rhs.tail(20));
  EXPECT_LT((y - part.y_future * g_true).cwiseAbs().maxCoeff(), 1e-8);
}

// 100 random minimal systems: data-driven simulation equals the recursion.
TEST(SimulateDdriven, OracleEquivalenceProperty) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 5;
    const Index m = 1 + (trial / 5) % 2;
    const Index p = 1 + (trial / 10) % 2;
    const LtiSystem sys = random_system(n, m, p, rng);
    const Index past = n;
    const Index future = 6;
    const Index length = (m + 1) * (past + future + n) + 20;
    const auto hist = generate_historical(sys, length, 1.0, 100 + trial);
    const HankelPartition part = partition(hist.data, {past, future}, n);
    const Vector x0 = gaussian(n, rng);
    const Matrix u = uniform(m, past + future, 1.0, rng);
    const Matrix y = recursion(sys.a(), sys.b(), sys.c(), sys.d(), x0, u);
    const Vector predicted =
        simulate_ddriven(part, stack_columns(u.leftCols(past)), stack_columns(y.leftCols(past)),
                         stack_columns(u.rightCols(future)));
    worst = std::max(worst, (predicted - stack_columns(y.rightCols(future))).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(TrajectoryCsv, RoundTripIsExact) {
  std::mt19937_64 rng(4);
  const TrajectoryData data(gaussian(2, 7, rng), gaussian(3, 7, rng));
  std::stringstream buffer;
  write_trajectory_csv(buffer, data);
  const std::string text = buffer.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,u_1,u_2,y_1,y_2,y_3");
  const TrajectoryData back = read_trajectory_csv(buffer);
  EXPECT_EQ(back.u, data.u);
  EXPECT_EQ(back.y, data.y);
}

TEST(TrajectoryCsv, RejectsMalformedInput) {
  std::stringstream bad_header("t,u_1,y_1\n0,1,2\n");
  EXPECT_ERROR_KIND(read_trajectory_csv(bad_header), ErrorKind::Io);
  std::stringstream short_row("k,u_1,y_1\n0,1\n");
  EXPECT_ERROR_KIND(read_trajectory_csv(short_row), ErrorKind::Io);
  std::stringstream not_number("k,u_1,y_1\n0,1,abc\n");
  EXPECT_ERROR_KIND(read_trajectory_csv(not_number), ErrorKind::Io);
}

TEST(TrajectoryData, ValidatesShapes) {
  EXPECT_ERROR_KIND(TrajectoryData(Matrix::Zero(1, 5), Matrix::Zero(1, 4)), ErrorKind::Dimension);
  EXPECT_ERROR_KIND(TrajectoryData(Matrix::Zero(0, 5), Matrix::Zero(1, 5)), ErrorKind::Dimension);
}
