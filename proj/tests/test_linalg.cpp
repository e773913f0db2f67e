#include <gtest/gtest.h>

#include "ddrobust/linalg.hpp"
#include "support.hpp"

using namespace ddrobust;
using testing_support::gaussian;

TEST(Linalg, RankMatchesPivotedQr) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Index r = 1 + trial % 5;
    const Matrix a = gaussian(8, r, rng) * gaussian(r, 12, rng);
    EXPECT_EQ(numerical_rank(a), r);
    EXPECT_EQ(testing_support::qr_rank(a), r);
  }
  EXPECT_EQ(numerical_rank(Matrix::Zero(3, 4)), 0);
}

TEST(Linalg, NullSpaceIsOrthonormalKernel) {
  std::mt19937_64 rng(5);
  const Matrix a = gaussian(3, 2, rng) * gaussian(2, 7, rng);
  const Matrix k = null_space(a);
  EXPECT_EQ(k.cols(), 5);
  EXPECT_LT((a * k).norm(), 1e-12);
  EXPECT_LT((k.transpose() * k - Matrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(Linalg, MinNormSolveIsOrthogonalToKernel) {
  std::mt19937_64 rng(7);
  const Matrix a = gaussian(4, 9, rng);
  const Vector b = gaussian(4, rng);
  const Vector x = min_norm_solve(a, b);
  EXPECT_LT((a * x - b).norm(), 1e-12);
  EXPECT_LT((null_space(a).transpose() * x).norm(), 1e-12);
}

TEST(Linalg, BlockDiagonalRepeat) {
  Matrix w(2, 2);
  w << 1, 2, 3, 4;
  const Matrix big = block_diagonal_repeat(w, 3);
  ASSERT_EQ(big.rows(), 6);
  EXPECT_EQ(big.block(2, 2, 2, 2), w);
  EXPECT_EQ(big.block(0, 2, 2, 2), Matrix::Zero(2, 2));
}

TEST(Linalg, ExpectSizeThrowsDimension) {
  EXPECT_ERROR_KIND(expect_size(2, 3, "x"), ErrorKind::Dimension);
  EXPECT_NO_THROW(expect_size(3, 3, "x"));
}
