#include "ddrobust/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddrobust/error.hpp"

namespace ddrobust {

NoiseModel::NoiseModel(double phi11, Vector phi12, Matrix phi22, double tol)
    : phi11_(phi11), phi12_(std::move(phi12)), phi22_(std::move(phi22)) {
  const Index d = phi22_.rows();
  if (d < 1 || phi22_.cols() != d) throw Error(ErrorKind::Dimension, "Phi22 must be square");
  expect_size(phi12_.size(), d, "Phi12");
  const double scale = std::max(1.0, phi22_.cwiseAbs().maxCoeff());
  if ((phi22_ - phi22_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::InvalidArgument, "Phi22 must be symmetric");
  }
  phi22_ = symmetrize(phi22_);
  if (max_eigenvalue(phi22_) >= -tol) {
    throw Error(ErrorKind::InvalidArgument, "Phi22 must be negative definite");
  }
}

NoiseModel NoiseModel::energy_bound(double epsilon, Index past, Index outputs) {
  if (epsilon < 0.0) throw Error(ErrorKind::InvalidArgument, "epsilon must be >= 0");
  const Index d = past * outputs;
  return NoiseModel(static_cast<double>(d) * epsilon, Vector::Zero(d),
                    -Matrix::Identity(d, d));
}

double NoiseModel::evaluate(const Vector& w) const {
  expect_size(w.size(), dimension(), "noise vector");
  return phi11_ + 2.0 * phi12_.dot(w) + w.dot(phi22_ * w);
}

Matrix NoiseModel::full() const {
  const Index d = dimension();
  Matrix phi(d + 1, d + 1);
  phi(0, 0) = phi11_;
  phi.block(0, 1, 1, d) = phi12_.transpose();
  phi.block(1, 0, d, 1) = phi12_;
  phi.bottomRightCorner(d, d) = phi22_;
  return phi;
}

NoiseSetShape NoiseParameterization::shape() const {
  if (radius_sq < -radius_tol) return NoiseSetShape::Empty;
  if (radius_sq <= radius_tol || basis.cols() == 0) return NoiseSetShape::Point;
  return NoiseSetShape::Ellipsoid;
}

NoiseParameterization build_parameterization(const HankelPartition& part,
                                             const Vector& u_ini,
                                             const Vector& y_ini,
                                             const NoiseModel& noise,
                                             double rel_tol) {
  expect_size(u_ini.size(), part.u_past.rows(), "u_ini");
  expect_size(y_ini.size(), part.y_past.rows(), "y_ini");
  expect_size(noise.dimension(), part.y_past.rows(), "noise model dimension");
  const Matrix& up = part.u_past;
  if (numerical_rank(up, rel_tol) != up.rows()) {
    throw Error(ErrorKind::PersistentExcitation, "U_p does not have full row rank");
  }

  NoiseParameterization param;
  param.kernel = null_space(up, rel_tol);
  if (param.kernel.cols() == 0) {
    throw Error(ErrorKind::DegenerateKernel, "ker(U_p) is trivial: no free noise parameter");
  }
  param.g_star = min_norm_solve(up, u_ini, rel_tol);
  param.w0 = y_ini - part.y_past * param.g_star;
  param.noise_map = part.y_past * param.kernel;

  const Matrix& phi22 = noise.phi22();
  const Matrix& ym = param.noise_map;
  const Index nw = param.kernel.cols();
  const Vector phi22_w0 = phi22 * param.w0;
  // Off-diagonal block as a column: -(Phi12 Y_p M + w0^T Phi22 Y_p M)^T
  const Vector cross = -ym.transpose() * (noise.phi12() + phi22_w0);

  Matrix& aw = param.constraint;
  aw.resize(nw + 1, nw + 1);
  aw(0, 0) = noise.phi11() + 2.0 * noise.phi12().dot(param.w0) + param.w0.dot(phi22_w0);
  aw.block(1, 0, nw, 1) = cross;
  aw.block(0, 1, 1, nw) = cross.transpose();
  aw.bottomRightCorner(nw, nw) = symmetrize(ym.transpose() * phi22 * ym);

  // Whitened coordinates on the row space of Y_p M.
  const Matrix row_basis = row_space(ym, rel_tol);
  const Index r = row_basis.cols();
  if (r > 0) {
    const Matrix reduced =
        symmetrize(-row_basis.transpose() * aw.bottomRightCorner(nw, nw) * row_basis);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
    if (eig.info() != Eigen::Success || eig.eigenvalues()(0) <= 0.0) {
      throw Error(ErrorKind::NumericalFailure, "reduced noise quadratic is not definite");
    }
    const Vector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    param.basis = row_basis * eig.eigenvectors() * inv_sqrt.asDiagonal();
  } else {
    param.basis = Matrix(nw, 0);
  }
  param.center = param.basis.transpose() * cross;
  const double a = aw(0, 0);
  param.radius_sq = a + param.center.squaredNorm();
  param.radius_tol =
      1e-10 * std::max({1.0, std::abs(a), param.center.squaredNorm()});
  return param;
}

Vector noise_from_gw(const NoiseParameterization& param, const Vector& g_w) {
  expect_size(g_w.size(), param.free_dimension(), "g_w");
  return -param.noise_map * g_w + param.w0;
}

double constraint_value(const NoiseParameterization& param, const Vector& g_w) {
  expect_size(g_w.size(), param.free_dimension(), "g_w");
  const Index nw = param.free_dimension();
  const Matrix& aw = param.constraint;
  return aw(0, 0) + 2.0 * aw.block(1, 0, nw, 1).col(0).dot(g_w) +
         g_w.dot(aw.bottomRightCorner(nw, nw) * g_w);
}

bool is_feasible_gw(const NoiseParameterization& param, const Vector& g_w, double tol) {
  return constraint_value(param, g_w) >= -tol;
}

std::vector<Vector> sample_feasible_gw(const NoiseParameterization& param,
                                       Index count, std::mt19937_64& rng) {
  if (param.shape() == NoiseSetShape::Empty) {
    throw Error(ErrorKind::Infeasible,
                "no noise sequence satisfies the bound and the data (max of the "
                "constraint is " + std::to_string(param.radius_sq) + ")");
  }
  std::vector<Vector> samples;
  if (count <= 0) return samples;
  samples.reserve(static_cast<std::size_t>(count));
  const Index r = param.reduced_dimension();
  const double radius = std::sqrt(std::max(param.radius_sq, 0.0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Index s = 0; s < count; ++s) {
    Vector z = param.center;
    if (r > 0) {
      Vector direction(r);
      double norm = 0.0;
      do {
        for (Index i = 0; i < r; ++i) direction(i) = normal(rng);
        norm = direction.norm();
      } while (norm == 0.0);
      const double scale = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(r));
      z += (scale / norm) * direction;
    }
    samples.push_back(param.basis * z);
  }
  return samples;
}

std::vector<Vector> sample_feasible_gw(const NoiseParameterization& param,
                                       Index count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_feasible_gw(param, count, rng);
}

}  // namespace ddrobust
