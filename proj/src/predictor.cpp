#include "ddrobust/predictor.hpp"

#include <algorithm>
#include <iostream>
#include <string>

#include "ddrobust/error.hpp"

namespace ddrobust {

namespace {

void expect_psd(const Matrix& w, const char* name) {
  if (w.rows() != w.cols() || w.rows() < 1) {
    throw Error(ErrorKind::Dimension, std::string(name) + " must be square");
  }
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be symmetric");
  }
  if (min_eigenvalue(symmetrize(w)) < -1e-10) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive semidefinite");
  }
}

}  // namespace

TrackingProblem::TrackingProblem(Vector reference, Matrix q, Matrix r, Index horizon)
    : reference_(std::move(reference)), q_(std::move(q)), r_(std::move(r)), horizon_(horizon) {
  if (horizon_ < 1) throw Error(ErrorKind::Dimension, "horizon must be >= 1");
  expect_psd(q_, "Q");
  expect_psd(r_, "R");
  q_ = symmetrize(q_);
  r_ = symmetrize(r_);
  expect_size(reference_.size(), q_.rows() * horizon_, "reference");
  q_bar_ = block_diagonal_repeat(q_, horizon_);
  r_bar_ = block_diagonal_repeat(r_, horizon_);
}

TrackingProblem TrackingProblem::regulation(Matrix q, Matrix r, Index horizon) {
  const Index p = q.rows();
  return TrackingProblem(Vector::Zero(p * horizon), std::move(q), std::move(r), horizon);
}

RowSelection select_rows(const HankelPartition& part, double rel_tol) {
  const Matrix& up = part.u_past;
  const Matrix& yp = part.y_past;
  const Matrix& uf = part.u_future;
  const Index cols = part.columns();

  Matrix base(up.rows() + uf.rows(), cols);
  base << up, uf;
  if (numerical_rank(base, rel_tol) != base.rows()) {
    throw Error(ErrorKind::PersistentExcitation, "[U_p; U_f] does not have full row rank");
  }
  Matrix full(base.rows() + yp.rows(), cols);
  full << up, yp, uf;
  Eigen::JacobiSVD<Matrix> svd(full);
  const double threshold = rel_tol * svd.singularValues()(0);

  // Orthonormal basis of the accepted row space, grown one row at a time.
  Eigen::HouseholderQR<Matrix> qr(base.transpose());
  Matrix basis = qr.householderQ() * Matrix::Identity(cols, base.rows());
  basis.conservativeResize(cols, std::min(cols, base.rows() + yp.rows()));
  Index filled = base.rows();

  RowSelection out;
  for (Index i = 0; i < yp.rows() && filled < cols; ++i) {
    Vector residual = yp.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      residual -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * residual);
    }
    const double norm = residual.norm();
    if (norm > threshold) {
      basis.col(filled++) = residual / norm;
      out.selected.push_back(i);
    }
  }

  const Index selected = static_cast<Index>(out.selected.size());
  out.lambda.resize(up.rows() + selected + uf.rows(), cols);
  out.lambda.topRows(up.rows()) = up;
  for (Index k = 0; k < selected; ++k) out.lambda.row(up.rows() + k) = yp.row(out.selected[k]);
  out.lambda.bottomRows(uf.rows()) = uf;

  const Index full_rank = numerical_rank(full, rel_tol);
  const Index lambda_rank = numerical_rank(out.lambda, rel_tol);
  if (lambda_rank != out.lambda.rows() || lambda_rank != full_rank) {
    throw Error(ErrorKind::Conditioning,
                "row selection produced rank " + std::to_string(lambda_rank) + " for " +
                    std::to_string(out.lambda.rows()) + " rows (stack rank " +
                    std::to_string(full_rank) + ")");
  }
  return out;
}

OutputPredictor build_predictor(const HankelPartition& part, const RowSelection& rows,
                                const NoiseParameterization& param, double rel_tol) {
  const Matrix& lambda = rows.lambda;
  expect_size(lambda.cols(), part.columns(), "Lambda columns");
  expect_size(param.kernel.rows(), part.columns(), "kernel basis rows");

  Eigen::JacobiSVD<Matrix> svd(lambda);
  const Vector& s = svd.singularValues();
  if (s.size() < lambda.rows() || s(0) <= 0.0 || s(lambda.rows() - 1) <= rel_tol * s(0)) {
    throw Error(ErrorKind::Conditioning, "Lambda is numerically rank deficient");
  }
  const double ratio = s(0) / s(lambda.rows() - 1);

  OutputPredictor pred;
  pred.selected_rows = rows.selected;
  pred.lambda = lambda;
  pred.gram_condition = ratio * ratio;
  if (pred.gram_condition > kGramConditionWarning) {
    std::clog << "warning: Lambda Lambda^T condition number " << pred.gram_condition << '\n';
  }

  // Lambda^T (Lambda Lambda^T)^{-1} = Q R^{-T} for Lambda^T = Q R.
  Eigen::HouseholderQR<Matrix> qr(lambda.transpose());
  const Index k = lambda.rows();
  const Matrix q = qr.householderQ() * Matrix::Identity(lambda.cols(), k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  // Only the columns multiplying the future-input block are needed.
  const Index mf = part.u_future.rows();
  const Matrix selector_cols = Matrix::Identity(k, k).rightCols(mf);
  const Matrix rt_inv_sel = r.transpose().triangularView<Eigen::Lower>().solve(selector_cols);
  const Matrix pinv_future = q * rt_inv_sel;  // N_c x m*T_e

  pred.b_u = part.y_future * pinv_future;
  pred.b_ini = part.y_future - pred.b_u * part.u_future;
  pred.b_w = pred.b_ini * param.kernel;
  pred.y0 = pred.b_ini * param.g_star;
  return pred;
}

Vector predict(const OutputPredictor& pred, const Vector& u, const Vector& g_w) {
  expect_size(u.size(), pred.b_u.cols(), "u");
  expect_size(g_w.size(), pred.b_w.cols(), "g_w");
  return pred.b_u * u + pred.b_w * g_w + pred.y0;
}

double lqte(const TrackingProblem& prob, const Vector& u, const Vector& y) {
  expect_size(y.size(), prob.q_bar().rows(), "y");
  expect_size(u.size(), prob.r_bar().rows(), "u");
  const Vector e = y - prob.reference();
  return e.dot(prob.q_bar() * e) + u.dot(prob.r_bar() * u);
}

Matrix build_qg(const OutputPredictor& pred, const TrackingProblem& prob,
                const Vector& u, double gamma) {
  expect_size(u.size(), pred.b_u.cols(), "u");
  expect_size(prob.reference().size(), pred.b_u.rows(), "reference");
  const Index nw = pred.b_w.cols();
  const Vector e = pred.b_u * u + pred.y0 - prob.reference();
  const Matrix qbw = prob.q_bar() * pred.b_w;
  Matrix qg(nw + 1, nw + 1);
  qg(0, 0) = gamma - u.dot(prob.r_bar() * u) - e.dot(prob.q_bar() * e);
  const Vector cross = -(qbw.transpose() * e);
  qg.block(1, 0, nw, 1) = cross;
  qg.block(0, 1, 1, nw) = cross.transpose();
  qg.bottomRightCorner(nw, nw) = -symmetrize(pred.b_w.transpose() * qbw);
  return qg;
}

}  // namespace ddrobust
