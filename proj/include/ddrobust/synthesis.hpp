#pragma once

#include <limits>
#include <memory>
#include <string>

#include "ddrobust/lmi.hpp"
#include "ddrobust/noise.hpp"
#include "ddrobust/predictor.hpp"

namespace ddrobust {

/// Variable order of the synthesis LMI: x = [u; gamma; alpha].
struct LmiLayout {
  Index input_dim = 0;  // m*T_e
  Index noise_dim = 0;  // n_w
  Index gamma() const { return input_dim; }
  Index alpha() const { return input_dim + 1; }
  Index variables() const { return input_dim + 2; }
};

/// The robust problem in kernel-free, whitened noise coordinates z, where
/// g_w = basis * z and the noise constraint reads |z - center|^2 <= radius_sq.
/// Shared by the multiplier search and the worst-case oracle.
struct ReducedProblem {
  Matrix cost_hessian;  // R_bar + B_u^T Q_bar B_u
  Matrix input_gain;    // B_u
  Matrix noise_gain;    // B_w * basis
  Vector offset;        // y0 - r
  Matrix q_bar;
  Matrix r_bar;
  Matrix basis;
  double constraint_offset = 0.0;  // A_w(0, 0)
  Vector center;
  double radius_sq = 0.0;
  NoiseSetShape shape = NoiseSetShape::Ellipsoid;
};

struct AssembledLmi {
  LmiProblem lmi;      // full size: m*T_e + 1 + n_w
  LmiLayout layout;
  Matrix congruence;   // maps the reduced, well-scaled LMI onto the full one
  ReducedProblem reduced;
};

struct AssemblyOptions {
  /// When false, a singular R is accepted as long as R_bar + B_u^T Q_bar B_u
  /// is still positive definite.
  bool require_positive_definite_r = true;
  double definiteness_tol = 1e-10;
};

ReducedProblem reduce_problem(const OutputPredictor& pred, const TrackingProblem& prob,
                              const NoiseParameterization& param);

/// Builds the block LMI
///
///   [ (R_bar + B_u^T Q_bar B_u)^{-1}   [u 0]              ]
///   [ [u 0]^T                          Q_g^a(u,g) - a A_w ]  >= 0
///
/// affinely in (u, gamma, alpha), minimizing gamma with alpha >= 0.
AssembledLmi assemble_lmi(const OutputPredictor& pred, const TrackingProblem& prob,
                          const NoiseParameterization& param,
                          const AssemblyOptions& options = {});

/// The block matrix above evaluated directly at (u, gamma, alpha).
Matrix lmi_matrix(const OutputPredictor& pred, const TrackingProblem& prob,
                  const NoiseParameterization& param, const Vector& u, double gamma,
                  double alpha);

enum class SynthesisMethod {
  Conic,             // generic SDP backend on the reduced LMI
  MultiplierSearch,  // 1-D convex search over the S-lemma multiplier
};

enum class ConicSolver { Clarabel, Scs };

std::shared_ptr<const SdpBackend> make_backend(ConicSolver solver);

struct SynthesisOptions {
  SynthesisMethod method = SynthesisMethod::Conic;
  std::shared_ptr<const SdpBackend> backend;  // defaults to Clarabel
  SdpSettings sdp;
  double certificate_tol = 1e-7;
  AssemblyOptions assembly;
};

struct SynthesisResult {
  Vector u_star;
  double gamma_star = std::numeric_limits<double>::quiet_NaN();
  /// +inf when the noise set is a single point: the multiplier is not attained.
  double alpha_star = std::numeric_limits<double>::quiet_NaN();
  SolverStatus status = SolverStatus::NumericalFailure;
  double solve_time = 0.0;  // seconds
  /// Minimum eigenvalue of the full LMI at the returned point (NaN if the
  /// multiplier is not attained).
  double lmi_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  std::string method;
  Index iterations = 0;
  std::string detail;

  bool optimal() const { return status == SolverStatus::Optimal; }
};

SynthesisResult solve(const AssembledLmi& assembled, const SynthesisOptions& options = {});

/// assemble_lmi followed by solve.
SynthesisResult synthesize(const OutputPredictor& pred, const TrackingProblem& prob,
                           const NoiseParameterization& param,
                           const SynthesisOptions& options = {});

/// Maximizer of s^T G s + 2 h^T s over |s| <= 1 (G symmetric).
struct BallMaximum {
  Vector s;
  double value = 0.0;
  double multiplier = 0.0;  // lambda with (lambda I - G) s = h
};

BallMaximum maximize_on_unit_ball(const Matrix& g, const Vector& h);

struct WorstCase {
  double gamma = 0.0;
  Vector g_w;
};

/// Exact maximum of LQTE(u, predict(u, g_w)) over all feasible g_w.
WorstCase worst_case_cost(const OutputPredictor& pred, const TrackingProblem& prob,
                          const NoiseParameterization& param, const Vector& u);
WorstCase worst_case_cost(const ReducedProblem& reduced, const Vector& u);

}  // namespace ddrobust
