#include "ddrobust/linalg.hpp"

#include <string>

#include "ddrobust/error.hpp"

namespace ddrobust {

namespace {

Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Index rank_from_singular_values(const Vector& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double threshold = rel_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > threshold) ++r;
  return r;
}

}  // namespace

Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return rank_from_singular_values(svd.singularValues(), rel_tol);
}

Vector min_norm_solve(const Matrix& a, const Vector& b, double rel_tol) {
  expect_size(b.size(), a.rows(), "right-hand side");
  if (a.size() == 0) return Vector::Zero(a.cols());
  const auto svd = thin_svd(a);
  const Index r = rank_from_singular_values(svd.singularValues(), rel_tol);
  const auto u = svd.matrixU().leftCols(r);
  const auto v = svd.matrixV().leftCols(r);
  const Vector coeffs =
      (u.transpose() * b).cwiseQuotient(svd.singularValues().head(r));
  return v * coeffs;
}

Matrix null_space(const Matrix& a, double rel_tol) {
  if (a.rows() == 0) return Matrix::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Index r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(a.cols() - r);
}

Matrix row_space(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix(a.cols(), 0);
  const auto svd = thin_svd(a);
  const Index r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixV().leftCols(r);
}

Matrix block_diagonal_repeat(const Matrix& w, Index n) {
  Matrix out = Matrix::Zero(w.rows() * n, w.cols() * n);
  for (Index k = 0; k < n; ++k) {
    out.block(k * w.rows(), k * w.cols(), w.rows(), w.cols()) = w;
  }
  return out;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(symmetric.rows() - 1);
}

void expect_size(Index actual, Index expected, const char* what) {
  if (actual != expected) {
    throw Error(ErrorKind::Dimension, std::string(what) + ": expected size " +
                                          std::to_string(expected) + ", got " +
                                          std::to_string(actual));
  }
}

}  // namespace ddrobust
