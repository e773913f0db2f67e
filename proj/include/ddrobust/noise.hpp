#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ddrobust/behavioral.hpp"

namespace ddrobust {

/// Quadratic bound [1; w]^T Phi [1; w] >= 0 on the stacked measurement noise
/// w (length p*T_ini), with Phi22 symmetric negative definite.
class NoiseModel {
 public:
  NoiseModel(double phi11, Vector phi12, Matrix phi22, double tol = 1e-12);

  /// Phi11 = T_ini * p * epsilon, Phi12 = 0, Phi22 = -I: sum of squared noise
  /// samples bounded by Phi11.
  static NoiseModel energy_bound(double epsilon, Index past, Index outputs);

  double phi11() const { return phi11_; }
  /// Stored as a column; it multiplies w from the left as a row.
  const Vector& phi12() const { return phi12_; }
  const Matrix& phi22() const { return phi22_; }
  Index dimension() const { return phi22_.rows(); }

  /// [1; w]^T Phi [1; w]
  double evaluate(const Vector& w) const;
  Matrix full() const;

 private:
  double phi11_;
  Vector phi12_;
  Matrix phi22_;
};

enum class NoiseSetShape { Empty, Point, Ellipsoid };

/// Every noise consistent with the recent data and the Hankel range:
/// w = -Y_p M g_w + w0, with [1; g_w]^T A_w [1; g_w] >= 0.
///
/// Directions of g_w in ker(Y_p M) leave w unchanged, so the bounded part of
/// the feasible set lives in the row space of Y_p M. `basis` maps whitened
/// coordinates z onto that subspace (g_w = basis * z) such that the
/// constraint reads |z - center|^2 <= radius_sq.
struct NoiseParameterization {
  Matrix kernel;       // M, N_c x n_w, orthonormal columns spanning ker(U_p)
  Vector g_star;       // minimum-norm solution of U_p g = u_ini
  Vector w0;           // y_ini - Y_p g_star
  Matrix noise_map;    // Y_p M
  Matrix constraint;   // A_w, (1 + n_w) x (1 + n_w)

  Matrix basis;        // n_w x r
  Vector center;       // r
  double radius_sq = 0.0;
  double radius_tol = 0.0;

  Index free_dimension() const { return kernel.cols(); }
  Index reduced_dimension() const { return basis.cols(); }
  NoiseSetShape shape() const;
  /// g_w of the ellipsoid center (the unique feasible g_w up to kernel
  /// directions when the set is a point).
  Vector center_gw() const { return basis * center; }
};

NoiseParameterization build_parameterization(const HankelPartition& part,
                                             const Vector& u_ini,
                                             const Vector& y_ini,
                                             const NoiseModel& noise,
                                             double rel_tol = kDefaultRankTolerance);

/// -Y_p M g_w + w0
Vector noise_from_gw(const NoiseParameterization& param, const Vector& g_w);

/// [1; g_w]^T A_w [1; g_w]
double constraint_value(const NoiseParameterization& param, const Vector& g_w);

bool is_feasible_gw(const NoiseParameterization& param, const Vector& g_w,
                    double tol = 1e-9);

/// Uniform samples over the reduced ellipsoid, mapped back to g_w (zero
/// component along ker(Y_p M)). Throws Infeasible if the set is empty.
std::vector<Vector> sample_feasible_gw(const NoiseParameterization& param,
                                       Index count, std::mt19937_64& rng);
std::vector<Vector> sample_feasible_gw(const NoiseParameterization& param,
                                       Index count, std::uint64_t seed);

}  // namespace ddrobust
