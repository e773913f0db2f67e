#pragma once

#include <Eigen/Dense>

namespace ddrobust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative singular-value threshold shared by every rank decision
/// (persistent excitation, kernels, row selection, minimality checks).
inline constexpr double kDefaultRankTolerance = 1e-9;

/// Number of singular values above `rel_tol * sigma_max`.
Index numerical_rank(const Matrix& a, double rel_tol = kDefaultRankTolerance);

/// Minimum-norm least-squares solution of a x = b through a thresholded SVD.
Vector min_norm_solve(const Matrix& a, const Vector& b,
                      double rel_tol = kDefaultRankTolerance);

/// Orthonormal basis of ker(a), as columns.
Matrix null_space(const Matrix& a, double rel_tol = kDefaultRankTolerance);

/// Orthonormal basis of the row space of a, as columns (right singular vectors).
Matrix row_space(const Matrix& a, double rel_tol = kDefaultRankTolerance);

/// I_n kron w.
Matrix block_diagonal_repeat(const Matrix& w, Index n);

Matrix symmetrize(const Matrix& a);

double min_eigenvalue(const Matrix& symmetric);
double max_eigenvalue(const Matrix& symmetric);

/// Throws Error(Dimension) with `what` when the sizes disagree.
void expect_size(Index actual, Index expected, const char* what);

}  // namespace ddrobust
