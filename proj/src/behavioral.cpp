#include "ddrobust/behavioral.hpp"

#include <string>

#include "ddrobust/error.hpp"

namespace ddrobust {

TrajectoryData::TrajectoryData(Matrix inputs, Matrix outputs)
    : u(std::move(inputs)), y(std::move(outputs)) {
  if (u.rows() < 1 || y.rows() < 1 || u.cols() < 1) {
    throw Error(ErrorKind::Dimension,
                "trajectory data needs m >= 1, p >= 1 and T_d >= 1");
  }
  expect_size(y.cols(), u.cols(), "output sequence length");
}

Matrix HankelPartition::initial_stack() const {
  Matrix stack(u_past.rows() + y_past.rows(), columns());
  stack << u_past, y_past;
  return stack;
}

Matrix build_hankel(const Matrix& seq, Index depth) {
  const Index q = seq.rows();
  const Index length = seq.cols();
  if (depth < 1 || depth > length) {
    throw Error(ErrorKind::Dimension, "Hankel depth " + std::to_string(depth) +
                                          " outside [1, " +
                                          std::to_string(length) + "]");
  }
  const Index cols = length - depth + 1;
  Matrix h(q * depth, cols);
  for (Index i = 0; i < depth; ++i) {
    h.middleRows(i * q, q) = seq.middleCols(i, cols);
  }
  return h;
}

bool is_persistently_exciting(const Matrix& seq, Index order, double rel_tol) {
  const Matrix h = build_hankel(seq, order);
  if (h.rows() > h.cols()) return false;
  return numerical_rank(h, rel_tol) == h.rows();
}

HankelPartition partition(const TrajectoryData& data, Horizons horizons,
                          std::optional<Index> state_dim, double rel_tol) {
  if (horizons.past < 1 || horizons.future < 1) {
    throw Error(ErrorKind::Dimension, "T_ini and T_e must be at least 1");
  }
  if (horizons.depth() > data.length()) {
    throw Error(ErrorKind::Dimension,
                "T_ini + T_e = " + std::to_string(horizons.depth()) +
                    " exceeds data length " + std::to_string(data.length()));
  }
  if (state_dim) {
    const Index order = horizons.depth() + *state_dim;
    if (order > data.length() || !is_persistently_exciting(data.u, order, rel_tol)) {
      throw Error(ErrorKind::PersistentExcitation,
                  "input is not persistently exciting of order " +
                      std::to_string(order));
    }
  }
  const Index m = data.inputs();
  const Index p = data.outputs();
  const Matrix hu = build_hankel(data.u, horizons.depth());
  const Matrix hy = build_hankel(data.y, horizons.depth());

  HankelPartition part;
  part.horizons = horizons;
  part.inputs = m;
  part.outputs = p;
  part.u_past = hu.topRows(m * horizons.past);
  part.u_future = hu.bottomRows(m * horizons.future);
  part.y_past = hy.topRows(p * horizons.past);
  part.y_future = hy.bottomRows(p * horizons.future);
  return part;
}

bool is_trajectory(const HankelPartition& part, const Vector& u_ini,
                   const Vector& y_ini, double tol) {
  expect_size(u_ini.size(), part.u_past.rows(), "u_ini");
  expect_size(y_ini.size(), part.y_past.rows(), "y_ini");
  const Matrix stack = part.initial_stack();
  Vector rhs(stack.rows());
  rhs << u_ini, y_ini;
  const Vector g = min_norm_solve(stack, rhs);
  return (stack * g - rhs).lpNorm<Eigen::Infinity>() <= tol;
}

Vector simulate_ddriven(const HankelPartition& part, const Vector& u_ini,
                        const Vector& y_ini, const Vector& u, double tol) {
  expect_size(u_ini.size(), part.u_past.rows(), "u_ini");
  expect_size(y_ini.size(), part.y_past.rows(), "y_ini");
  expect_size(u.size(), part.u_future.rows(), "u");
  const Index rows = part.u_past.rows() + part.y_past.rows() + part.u_future.rows();
  Matrix stack(rows, part.columns());
  stack << part.u_past, part.y_past, part.u_future;
  Vector rhs(rows);
  rhs << u_ini, y_ini, u;
  const Vector g = min_norm_solve(stack, rhs);
  const double residual = (stack * g - rhs).lpNorm<Eigen::Infinity>();
  if (residual > tol) {
    throw Error(ErrorKind::InconsistentInitialCondition,
                "initial trajectory is not consistent with the data (residual " +
                    std::to_string(residual) + ")");
  }
  return part.y_future * g;
}

Vector stack_columns(const Matrix& seq) {
  return Eigen::Map<const Vector>(seq.data(), seq.size());
}

Matrix unstack(const Vector& v, Index rows) {
  if (rows < 1 || v.size() % rows != 0) {
    throw Error(ErrorKind::Dimension, "cannot reshape vector of size " +
                                          std::to_string(v.size()) + " into " +
                                          std::to_string(rows) + " rows");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

}  // namespace ddrobust
