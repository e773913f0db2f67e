#pragma once

#include <optional>

#include "ddrobust/linalg.hpp"

namespace ddrobust {

/// Historical input/output record: column k holds the sample at time k.
struct TrajectoryData {
  Matrix u;  // m x T_d
  Matrix y;  // p x T_d

  TrajectoryData() = default;
  TrajectoryData(Matrix inputs, Matrix outputs);

  Index inputs() const { return u.rows(); }
  Index outputs() const { return y.rows(); }
  Index length() const { return u.cols(); }
};

/// Past window (fixes the initial condition) and future window (the horizon).
struct Horizons {
  Index past = 0;    // T_ini
  Index future = 0;  // T_e

  Index depth() const { return past + future; }
};

/// Depth-(T_ini + T_e) Hankel matrices of the historical data split into the
/// past and future block rows.
struct HankelPartition {
  Matrix u_past;    // U_p, m*T_ini x N_c
  Matrix y_past;    // Y_p, p*T_ini x N_c
  Matrix u_future;  // U_f, m*T_e x N_c
  Matrix y_future;  // Y_f, p*T_e x N_c
  Horizons horizons;
  Index inputs = 0;
  Index outputs = 0;

  Index columns() const { return u_past.cols(); }
  /// [U_p; Y_p]
  Matrix initial_stack() const;
};

/// Block Hankel matrix of depth `depth`: block (i, j) is column i + j of `seq`.
Matrix build_hankel(const Matrix& seq, Index depth);

/// True iff the depth-`order` Hankel matrix of `seq` has full row rank.
bool is_persistently_exciting(const Matrix& seq, Index order,
                              double rel_tol = kDefaultRankTolerance);

/// Splits the Hankel matrices of `data`. When `state_dim` is given, the input
/// is additionally required to be persistently exciting of order
/// T_ini + T_e + state_dim.
HankelPartition partition(const TrajectoryData& data, Horizons horizons,
                          std::optional<Index> state_dim = std::nullopt,
                          double rel_tol = kDefaultRankTolerance);

inline constexpr double kDefaultTrajectoryTolerance = 1e-6;

/// Whether (u_ini, y_ini) lies in range([U_p; Y_p]) up to `tol` (infinity
/// norm of the least-squares residual).
bool is_trajectory(const HankelPartition& part, const Vector& u_ini,
                   const Vector& y_ini, double tol = kDefaultTrajectoryTolerance);

/// Output over the future window for input `u` after the initial trajectory
/// (u_ini, y_ini), from the minimum-norm g of [U_p; Y_p; U_f] g = [u_ini; y_ini; u].
Vector simulate_ddriven(const HankelPartition& part, const Vector& u_ini,
                        const Vector& y_ini, const Vector& u,
                        double tol = kDefaultTrajectoryTolerance);

/// Stacks the columns of a q x T matrix into a q*T vector (time-major).
Vector stack_columns(const Matrix& seq);
/// Inverse of stack_columns.
Matrix unstack(const Vector& v, Index rows);

}  // namespace ddrobust
