#include "ddrobust/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "ddrobust/error.hpp"
#include "ddrobust/clarabel_backend.hpp"
#include "ddrobust/scs_backend.hpp"

namespace ddrobust {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// min_u u^T H u + 2 f^T u + c  ->  (u*, value)
std::pair<Vector, double> minimize_quadratic(const Matrix& h, const Vector& f, double c) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "quadratic in u is not positive definite");
  }
  Vector u = -llt.solve(f);
  return {u, c + f.dot(u)};
}

double reduced_cost(const ReducedProblem& rp, const Vector& u, const Vector& z) {
  Vector e = rp.input_gain * u + rp.offset;
  if (z.size() > 0) e += rp.noise_gain * z;
  return u.dot(rp.r_bar * u) + e.dot(rp.q_bar * e);
}

// Noise set collapsed to one point: the problem is a deterministic LQ tracking
// problem with the output offset shifted by the center.
SynthesisResult solve_pinned(const ReducedProblem& rp) {
  Vector c = rp.offset;
  if (rp.center.size() > 0) c += rp.noise_gain * rp.center;
  const Vector f = rp.input_gain.transpose() * (rp.q_bar * c);
  auto [u, value] = minimize_quadratic(rp.cost_hessian, f, c.dot(rp.q_bar * c));
  SynthesisResult res;
  res.u_star = std::move(u);
  res.gamma_star = reduced_cost(rp, res.u_star, rp.center);
  res.alpha_star = std::numeric_limits<double>::infinity();
  res.status = SolverStatus::Optimal;
  res.detail = "noise set is a single point; deterministic tracking problem solved";
  return res;
}

SynthesisResult solve_multiplier_search(const ReducedProblem& rp) {
  // Centered coordinates z = center + s: the constraint is radius_sq - |s|^2 >= 0.
  const Matrix& bu = rp.input_gain;
  const Matrix& bw = rp.noise_gain;
  const Matrix& qb = rp.q_bar;
  const Index r = bw.cols();
  const Vector offset = r > 0 ? Vector(rp.offset + bw * rp.center) : rp.offset;
  const double a = rp.radius_sq;

  const Vector base_f = bu.transpose() * (qb * offset);
  const double base_c = offset.dot(qb * offset);

  SynthesisResult res;
  res.status = SolverStatus::Optimal;
  const Matrix gram = symmetrize(bw.transpose() * qb * bw);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& mu = eig.eigenvalues();
  const Matrix& vecs = eig.eigenvectors();
  const double mu_max = r > 0 ? mu(r - 1) : 0.0;
  const double h_scale = std::max(1.0, rp.cost_hessian.cwiseAbs().maxCoeff());

  if (r == 0 || mu_max <= 1e-14 * h_scale) {
    // Output does not depend on the noise: alpha = 0 is optimal.
    auto [u, value] = minimize_quadratic(rp.cost_hessian, base_f, base_c);
    res.u_star = std::move(u);
    res.gamma_star = value;
    res.alpha_star = 0.0;
    return res;
  }

  const Matrix k_in = vecs.transpose() * (bw.transpose() * qb * bu);  // eigenbasis
  const Vector k_c = vecs.transpose() * (bw.transpose() * (qb * offset));
  const double lower = std::max(mu_max, 0.0);

  // gamma(alpha) = min_u [u^T R u + e^T Q e + alpha a + k^T (alpha I - G)^{-1} k], k = B^T Q e
  auto evaluate = [&](double alpha) {
    const Vector inv = (Vector::Constant(r, alpha) - mu).cwiseInverse();
    const Vector& k0 = k_c;
    const Matrix h = rp.cost_hessian + k_in.transpose() * inv.asDiagonal() * k_in;
    const Vector f = base_f + k_in.transpose() * inv.cwiseProduct(k0);
    const double c = base_c + alpha * a + k0.dot(inv.cwiseProduct(k0));
    return minimize_quadratic(h, f, c);
  };

  // gamma is convex in alpha, hence unimodal in t = log(alpha - lower). Very
  // close to lower the evaluation loses accuracy; the edge is handled below.
  const double scale = std::max({mu_max, a, 1e-12});
  auto objective = [&](double t) { return evaluate(lower + scale * std::exp(t)).second; };
  const int bits = std::numeric_limits<double>::digits / 2;
  std::uintmax_t max_iter = 500;
  const auto [t_best, gamma_best] =
      boost::math::tools::brent_find_minima(objective, std::log(1e-9), std::log(1e12), bits, max_iter);

  res.alpha_star = lower + scale * std::exp(t_best);
  auto [u, value] = evaluate(res.alpha_star);
  res.u_star = std::move(u);
  res.gamma_star = value;

  // The infimum may sit at alpha = mu_max itself, where the top-eigenspace
  // part of k must vanish and the inverse becomes a pseudo-inverse.
  if (mu_max > 0.0) {
    std::vector<Index> top;
    Vector inv = Vector::Zero(r);
    for (Index i = 0; i < r; ++i) {
      if (mu(i) >= mu_max * (1.0 - 1e-9)) top.push_back(i);
      else inv(i) = 1.0 / (mu_max - mu(i));
    }
    Matrix e(static_cast<Index>(top.size()), k_in.cols());
    Vector e0(static_cast<Index>(top.size()));
    for (std::size_t i = 0; i < top.size(); ++i) {
      e.row(static_cast<Index>(i)) = k_in.row(top[i]);
      e0(static_cast<Index>(i)) = k_c(top[i]);
    }
    const Vector u0 = min_norm_solve(e, -e0);
    if ((e * u0 + e0).norm() <= 1e-9 * std::max(1.0, e0.norm())) {
      const Matrix h = rp.cost_hessian + k_in.transpose() * inv.asDiagonal() * k_in;
      const Vector f = base_f + k_in.transpose() * inv.cwiseProduct(k_c);
      const double c = base_c + mu_max * a + k_c.dot(inv.cwiseProduct(k_c));
      const Matrix n = null_space(e);
      const double c0 = u0.dot(h * u0) + 2.0 * f.dot(u0) + c;
      Vector u_edge = u0;
      double edge = c0;
      if (n.cols() > 0) {
        auto [v, reduced] =
            minimize_quadratic(symmetrize(n.transpose() * h * n), n.transpose() * (h * u0 + f), c0);
        u_edge += n * v;
        edge = reduced;
      }
      if (edge <= res.gamma_star) {
        res.u_star = std::move(u_edge);
        res.gamma_star = edge;
        res.alpha_star = mu_max;
      }
    }
  }
  res.iterations = static_cast<Index>(max_iter);
  (void)gamma_best;
  return res;
}

}  // namespace

ReducedProblem reduce_problem(const OutputPredictor& pred, const TrackingProblem& prob,
                              const NoiseParameterization& param) {
  expect_size(prob.reference().size(), pred.b_u.rows(), "reference");
  expect_size(prob.r_bar().rows(), pred.b_u.cols(), "input weight");
  expect_size(param.free_dimension(), pred.b_w.cols(), "noise parameter");
  ReducedProblem rp;
  rp.q_bar = prob.q_bar();
  rp.r_bar = prob.r_bar();
  rp.input_gain = pred.b_u;
  rp.cost_hessian = symmetrize(rp.r_bar + pred.b_u.transpose() * rp.q_bar * pred.b_u);
  rp.basis = param.basis;
  rp.noise_gain = pred.b_w * param.basis;
  rp.offset = pred.y0 - prob.reference();
  rp.constraint_offset = param.constraint(0, 0);
  rp.center = param.center;
  rp.radius_sq = param.radius_sq;
  rp.shape = param.shape();
  return rp;
}

AssembledLmi assemble_lmi(const OutputPredictor& pred, const TrackingProblem& prob,
                          const NoiseParameterization& param, const AssemblyOptions& options) {
  AssembledLmi out;
  out.reduced = reduce_problem(pred, prob, param);
  const ReducedProblem& rp = out.reduced;

  if (options.require_positive_definite_r && min_eigenvalue(prob.r()) <= options.definiteness_tol) {
    throw Error(ErrorKind::CostDefiniteness,
                "R is not positive definite; pass require_positive_definite_r = false to "
                "accept it when R_bar + B_u^T Q_bar B_u is still invertible");
  }
  const double h_min = min_eigenvalue(rp.cost_hessian);
  if (h_min <= options.definiteness_tol) {
    throw Error(ErrorKind::CostDefiniteness,
                "R_bar + B_u^T Q_bar B_u is singular (min eigenvalue " + std::to_string(h_min) +
                    "); increase R or Q");
  }
  Eigen::LLT<Matrix> llt(rp.cost_hessian);
  const Matrix lower_factor = llt.matrixL();

  const Index mu = pred.b_u.cols();
  const Index nw = pred.b_w.cols();
  const Index n = mu + 1 + nw;
  out.layout.input_dim = mu;
  out.layout.noise_dim = nw;

  const Matrix& qb = rp.q_bar;
  const Vector& c = rp.offset;
  const Matrix qbw = qb * pred.b_w;

  LmiProblem& lmi = out.lmi;
  lmi.objective = Vector::Zero(out.layout.variables());
  lmi.objective(out.layout.gamma()) = 1.0;
  lmi.nonnegative = {out.layout.alpha()};

  lmi.constant = Matrix::Zero(n, n);
  lmi.constant.topLeftCorner(mu, mu) = symmetrize(llt.solve(Matrix::Identity(mu, mu)));
  lmi.constant(mu, mu) = -c.dot(qb * c);
  const Vector const_cross = -(qbw.transpose() * c);
  lmi.constant.block(mu + 1, mu, nw, 1) = const_cross;
  lmi.constant.block(mu, mu + 1, 1, nw) = const_cross.transpose();
  lmi.constant.bottomRightCorner(nw, nw) = -symmetrize(pred.b_w.transpose() * qbw);

  const Matrix bu_q_c = pred.b_u.transpose() * (qb * c);     // d/du of (B_u u)^T Q c
  const Matrix cross_u = -(qbw.transpose() * pred.b_u);      // nw x mu
  lmi.coefficients.reserve(static_cast<std::size_t>(out.layout.variables()));
  for (Index i = 0; i < mu; ++i) {
    Matrix f = Matrix::Zero(n, n);
    f(i, mu) = 1.0;
    f(mu, i) = 1.0;
    f(mu, mu) = -2.0 * bu_q_c(i);
    f.block(mu + 1, mu, nw, 1) = cross_u.col(i);
    f.block(mu, mu + 1, 1, nw) = cross_u.col(i).transpose();
    lmi.coefficients.push_back(std::move(f));
  }
  Matrix f_gamma = Matrix::Zero(n, n);
  f_gamma(mu, mu) = 1.0;
  lmi.coefficients.push_back(std::move(f_gamma));
  Matrix f_alpha = Matrix::Zero(n, n);
  f_alpha.bottomRightCorner(nw + 1, nw + 1) = -param.constraint;
  lmi.coefficients.push_back(std::move(f_alpha));

  const Index r = rp.basis.cols();
  out.congruence = Matrix::Zero(n, mu + 1 + r);
  out.congruence.topLeftCorner(mu, mu) = lower_factor;
  out.congruence(mu, mu) = 1.0;
  out.congruence.bottomRightCorner(nw, r) = rp.basis;
  if (r > 0) out.congruence.block(mu + 1, mu, nw, 1) = rp.basis * rp.center;
  return out;
}

Matrix lmi_matrix(const OutputPredictor& pred, const TrackingProblem& prob,
                  const NoiseParameterization& param, const Vector& u, double gamma,
                  double alpha) {
  const Index mu = pred.b_u.cols();
  const Index nw = pred.b_w.cols();
  expect_size(u.size(), mu, "u");
  const Matrix& qb = prob.q_bar();
  const Matrix h = prob.r_bar() + pred.b_u.transpose() * qb * pred.b_u;
  const Vector bu_u = pred.b_u * u;
  const Vector c = pred.y0 - prob.reference();

  Matrix qga(nw + 1, nw + 1);
  qga(0, 0) = gamma - bu_u.dot(qb * c) - c.dot(qb * bu_u) - c.dot(qb * c);
  const Vector cross = -(pred.b_w.transpose() * (qb * (bu_u + c)));
  qga.block(1, 0, nw, 1) = cross;
  qga.block(0, 1, 1, nw) = cross.transpose();
  qga.bottomRightCorner(nw, nw) = -pred.b_w.transpose() * qb * pred.b_w;

  Matrix out = Matrix::Zero(mu + 1 + nw, mu + 1 + nw);
  out.topLeftCorner(mu, mu) = h.inverse();
  out.block(0, mu, mu, 1) = u;
  out.block(mu, 0, 1, mu) = u.transpose();
  out.bottomRightCorner(nw + 1, nw + 1) = qga - alpha * param.constraint;
  return out;
}

SynthesisResult solve(const AssembledLmi& assembled, const SynthesisOptions& options) {
  const auto start = Clock::now();
  const ReducedProblem& rp = assembled.reduced;
  const LmiLayout& layout = assembled.layout;
  SynthesisResult res;

  switch (rp.shape) {
    case NoiseSetShape::Empty:
      res.status = SolverStatus::Infeasible;
      res.method = "none";
      res.detail = "feasible noise set is empty (constraint maximum " +
                   std::to_string(rp.radius_sq) + ")";
      res.solve_time = seconds_since(start);
      return res;
    case NoiseSetShape::Point:
      res = solve_pinned(rp);
      res.method = "pinned";
      res.solve_time = seconds_since(start);
      return res;
    case NoiseSetShape::Ellipsoid:
      break;
  }

  if (options.method == SynthesisMethod::MultiplierSearch) {
    res = solve_multiplier_search(rp);
    res.method = "multiplier";
  } else {
    const std::shared_ptr<const SdpBackend> backend =
        options.backend ? options.backend : make_backend(ConicSolver::Clarabel);
    const LmiProblem reduced = assembled.lmi.congruence(assembled.congruence);
    const SdpSolution sol = backend->solve(reduced, options.sdp);
    res.method = backend->name();
    res.status = sol.status;
    res.iterations = sol.iterations;
    res.detail = sol.detail;
    if (sol.status == SolverStatus::Optimal) {
      res.u_star = sol.x.head(layout.input_dim);
      res.gamma_star = sol.x(layout.gamma());
      res.alpha_star = sol.x(layout.alpha());
      if (res.alpha_star < 0.0 && res.alpha_star > -options.sdp.tolerance) res.alpha_star = 0.0;
    }
  }

  if (res.status == SolverStatus::Optimal) {
    Vector x(layout.variables());
    x << res.u_star, res.gamma_star, res.alpha_star;
    res.lmi_min_eigenvalue = min_eigenvalue(symmetrize(assembled.lmi.evaluate(x)));
    if (!(res.alpha_star >= 0.0) || !(res.lmi_min_eigenvalue >= -options.certificate_tol)) {
      res.status = SolverStatus::NumericalFailure;
      res.detail += "; LMI certificate failed (min eigenvalue " +
                    std::to_string(res.lmi_min_eigenvalue) + ", alpha " +
                    std::to_string(res.alpha_star) + ")";
    }
  }
  res.solve_time = seconds_since(start);
  return res;
}

std::shared_ptr<const SdpBackend> make_backend(ConicSolver solver) {
  if (solver == ConicSolver::Scs) return std::make_shared<ScsBackend>();
  return std::make_shared<ClarabelBackend>();
}

SynthesisResult synthesize(const OutputPredictor& pred, const TrackingProblem& prob,
                           const NoiseParameterization& param, const SynthesisOptions& options) {
  return solve(assemble_lmi(pred, prob, param, options.assembly), options);
}

BallMaximum maximize_on_unit_ball(const Matrix& g, const Vector& h) {
  const Index r = g.rows();
  expect_size(g.cols(), r, "quadratic");
  expect_size(h.size(), r, "linear term");
  BallMaximum out;
  out.s = Vector::Zero(r);
  if (r == 0) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(g));
  const Vector& mu = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  const Vector beta = v.transpose() * h;
  const double mu_max = mu(r - 1);
  const double scale = std::max({mu.cwiseAbs().maxCoeff(), h.norm(), 1e-300});

  auto step = [&](double lambda) {
    return Vector(beta.cwiseQuotient(Vector::Constant(r, lambda) - mu));
  };
  auto finish = [&](const Vector& coords, double lambda) {
    out.s = v * coords;
    out.value = out.s.dot(g * out.s) + 2.0 * h.dot(out.s);
    out.multiplier = lambda;
    return out;
  };

  if (mu_max < 0.0) {
    const Vector interior = step(0.0);
    if (interior.norm() <= 1.0) return finish(interior, 0.0);
  }
  const double lower = std::max(mu_max, 0.0);

  // Hard case: h has (almost) no component along the top eigenspace. The
  // secular root lies within |beta_top| / sqrt(1 - |rest|^2) of mu_max; when
  // that is below resolution, take the limit lambda = mu_max.
  if (mu_max >= 0.0) {
    const double gap_tol = 1e-12 * scale;
    Vector coords = Vector::Zero(r);
    Vector top_dir = Vector::Zero(r);
    Index top = r - 1;
    for (Index i = 0; i < r; ++i) {
      if (mu(i) >= mu_max - gap_tol) {
        top_dir(i) = beta(i);
        top = std::min(top, i);
      } else {
        coords(i) = beta(i) / (mu_max - mu(i));
      }
    }
    const double rest = coords.squaredNorm();
    if (rest < 1.0 && top_dir.norm() <= 1e-10 * scale * std::sqrt(1.0 - rest)) {
      if (top_dir.norm() == 0.0) top_dir(top) = 1.0;
      coords += top_dir.normalized() * std::sqrt(1.0 - rest);
      return finish(coords, mu_max);
    }
  }

  // Secular equation 1/|s(lambda)| = 1 on (lower, lower + |h|], safeguarded Newton.
  auto secular = [&](double lambda, double* slope) {
    const Vector d = Vector::Constant(r, lambda) - mu;
    const Vector q = beta.cwiseQuotient(d);
    const double norm2 = q.squaredNorm();
    const double norm = std::sqrt(norm2);
    if (slope != nullptr) *slope = q.cwiseQuotient(d).dot(q) / (norm2 * norm);
    return 1.0 / norm - 1.0;
  };
  double lo = lower;
  double hi = lower + h.norm();
  double lambda = hi;
  for (int iter = 0; iter < 200; ++iter) {
    double slope = 0.0;
    const double phi = secular(lambda, &slope);
    if (phi == 0.0) break;
    if (phi < 0.0) lo = lambda; else hi = lambda;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) break;
    double next = lambda - phi / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    lambda = next;
  }
  Vector coords = step(lambda);
  // Near mu_max the top coordinates inherit the rounding of lambda - mu_max;
  // recover them from the norm constraint instead.
  if (mu_max >= 0.0) {
    double rest = 0.0;
    double top = 0.0;
    for (Index i = 0; i < r; ++i) {
      if (mu(i) >= mu_max - 1e-12 * scale) top += coords(i) * coords(i);
      else rest += coords(i) * coords(i);
    }
    if (rest < 1.0 && top > 0.0) {
      const double factor = std::sqrt((1.0 - rest) / top);
      for (Index i = 0; i < r; ++i) {
        if (mu(i) >= mu_max - 1e-12 * scale) coords(i) *= factor;
      }
    }
  }
  if (coords.norm() > 1.0) coords.normalize();
  return finish(coords, lambda);
}

WorstCase worst_case_cost(const ReducedProblem& rp, const Vector& u) {
  expect_size(u.size(), rp.input_gain.cols(), "u");
  if (rp.shape == NoiseSetShape::Empty) {
    throw Error(ErrorKind::Infeasible, "feasible noise set is empty");
  }
  const double radius = std::sqrt(std::max(rp.radius_sq, 0.0));
  const Index r = rp.noise_gain.cols();
  Vector z = rp.center;
  if (r > 0 && radius > 0.0) {
    const Vector e0 = rp.input_gain * u + rp.offset + rp.noise_gain * rp.center;
    const Matrix qbw = rp.q_bar * rp.noise_gain;
    const Matrix g = (radius * radius) * symmetrize(rp.noise_gain.transpose() * qbw);
    const Vector h = radius * (qbw.transpose() * e0);
    z += radius * maximize_on_unit_ball(g, h).s;
  }
  WorstCase out;
  out.gamma = reduced_cost(rp, u, z);
  out.g_w = rp.basis * z;
  return out;
}

WorstCase worst_case_cost(const OutputPredictor& pred, const TrackingProblem& prob,
                          const NoiseParameterization& param, const Vector& u) {
  return worst_case_cost(reduce_problem(pred, prob, param), u);
}

}  // namespace ddrobust
