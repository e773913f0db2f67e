#include <gtest/gtest.h>

#include "ddrobust/experiment.hpp"
#include "ddrobust/synthesis.hpp"
#include "support.hpp"

using namespace ddrobust;
using namespace testing_support;

namespace {

constexpr Index kPast = 4;
constexpr Index kFuture = 20;

struct Problem {
  Scenario s;
  Vector y_ini;
  NoiseParameterization param;
  OutputPredictor pred;
  TrackingProblem prob;
};

// Example plant with y_ini corrupted by a noise of energy `injected` and a
// bound of energy epsilon per sample.
Problem make_problem(double epsilon, double injected = 5e-4, std::uint64_t seed = 7) {
  Scenario s = make_scenario(reference_plant(), kPast, kFuture, 100, seed);
  Vector y = s.y_ini;
  if (injected > 0.0) {
    const auto exact = build_parameterization(s.part, s.u_ini, s.y_ini,
                                              NoiseModel::energy_bound(injected, kPast, 1));
    y += noise_from_gw(exact, sample_feasible_gw(exact, 1, seed).front());
  }
  auto param = build_parameterization(s.part, s.u_ini, y,
                                      NoiseModel::energy_bound(epsilon, kPast, 1));
  auto pred = build_predictor(s.part, select_rows(s.part), param);
  auto prob = TrackingProblem::regulation(Matrix::Identity(1, 1), Matrix::Identity(1, 1), kFuture);
  return {std::move(s), std::move(y), std::move(param), std::move(pred), std::move(prob)};
}

const Problem& example() {
  static const Problem p = make_problem(1e-3);
  return p;
}

const SynthesisResult& example_result() {
  static const SynthesisResult r = [] {
    const Problem& p = example();
    return synthesize(p.pred, p.prob, p.param);
  }();
  return r;
}

class GarbageBackend final : public SdpBackend {
 public:
  std::string name() const override { return "garbage"; }
  SdpSolution solve(const LmiProblem& problem, const SdpSettings&) const override {
    SdpSolution out;
    out.status = SolverStatus::Optimal;
    out.x = Vector::Zero(problem.variables());
    return out;
  }
};

}  // namespace

TEST(AssembleLmi, BlockDimensions) {
  const Problem& p = example();
  const AssembledLmi a = assemble_lmi(p.pred, p.prob, p.param);
  const Index nw = p.param.free_dimension();
  EXPECT_EQ(a.layout.input_dim, kFuture);
  EXPECT_EQ(a.layout.noise_dim, nw);
  EXPECT_EQ(a.lmi.size(), kFuture + 1 + nw);
  EXPECT_EQ(a.lmi.variables(), kFuture + 2);
  EXPECT_EQ(a.lmi.nonnegative, (std::vector<Index>{kFuture + 1}));
  const Matrix h = p.prob.r_bar() + p.pred.b_u.transpose() * p.prob.q_bar() * p.pred.b_u;
  EXPECT_LT((a.lmi.constant.topLeftCorner(kFuture, kFuture) * h -
             Matrix::Identity(kFuture, kFuture))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(AssembleLmi, AffineCoefficientsMatchFiniteDifferences) {
  const Problem& p = example();
  const AssembledLmi a = assemble_lmi(p.pred, p.prob, p.param);
  std::mt19937_64 rng(3);
  const Vector u = gaussian(kFuture, rng);
  const double gamma = 2.5;
  const double alpha = 1.5;
  const Matrix base = lmi_matrix(p.pred, p.prob, p.param, u, gamma, alpha);
  Vector x(kFuture + 2);
  x << u, gamma, alpha;
  const double scale = std::max(1.0, base.cwiseAbs().maxCoeff());
  EXPECT_LT((a.lmi.evaluate(x) - base).cwiseAbs().maxCoeff(), 1e-12 * scale);
  for (Index i = 0; i < x.size(); ++i) {
    Vector du = u;
    double dg = gamma, da = alpha;
    if (i < kFuture) du(i) += 1.0;
    else if (i == kFuture) dg += 1.0;
    else da += 1.0;
    const Matrix diff = lmi_matrix(p.pred, p.prob, p.param, du, dg, da) - base;
    EXPECT_LT((diff - a.lmi.coefficients[static_cast<std::size_t>(i)]).cwiseAbs().maxCoeff(),
              1e-12 * scale)
        << "variable " << i;
  }
}

TEST(AssembleLmi, SchurEquivalenceOnRandomTriples) {
  const Problem& p = example();
  const SynthesisResult& r = example_result();
  ASSERT_TRUE(r.optimal());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int psd = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = r.u_star + 0.05 * unit(rng) * gaussian(kFuture, rng);
    const double gamma = r.gamma_star * (0.9 + 0.3 * unit(rng));
    const double alpha = r.alpha_star * (0.5 + 1.5 * unit(rng));
    const double big = min_eigenvalue(lmi_matrix(p.pred, p.prob, p.param, u, gamma, alpha));
    const double small = min_eigenvalue(build_qg(p.pred, p.prob, u, gamma) -
                                        alpha * p.param.constraint);
    EXPECT_EQ(big >= -1e-8, small >= -1e-8) << "big " << big << " small " << small;
    psd += big >= -1e-8;
  }
  EXPECT_GT(psd, 10);
  EXPECT_LT(psd, 90);
}

TEST(AssembleLmi, CostDefiniteness) {
  const Problem& p = example();
  const TrackingProblem no_r = TrackingProblem::regulation(Matrix::Identity(1, 1),
                                                           Matrix::Zero(1, 1), kFuture);
  EXPECT_ERROR_KIND(assemble_lmi(p.pred, no_r, p.param), ErrorKind::CostDefiniteness);
  // Without feedthrough B_u is strictly lower triangular, so R = 0 stays singular.
  AssemblyOptions relaxed;
  relaxed.require_positive_definite_r = false;
  EXPECT_ERROR_KIND(assemble_lmi(p.pred, no_r, p.param, relaxed), ErrorKind::CostDefiniteness);

  // With feedthrough, Q alone makes the Hessian definite.
  std::mt19937_64 rng(8);
  const LtiSystem sys = random_system(2, 1, 1, rng);
  const Scenario s = make_scenario(sys, 2, 5, 40, 8);
  const auto param =
      build_parameterization(s.part, s.u_ini, s.y_ini, NoiseModel::energy_bound(1e-3, 2, 1));
  const auto pred = build_predictor(s.part, select_rows(s.part), param);
  const TrackingProblem q_only =
      TrackingProblem::regulation(Matrix::Identity(1, 1), Matrix::Zero(1, 1), 5);
  EXPECT_NO_THROW(assemble_lmi(pred, q_only, param, relaxed));
}

TEST(Solve, ExampleIsOptimalAndCertified) {
  const Problem& p = example();
  const SynthesisResult& r = example_result();
  ASSERT_TRUE(r.optimal()) << r.detail;
  EXPECT_TRUE(std::isfinite(r.gamma_star));
  EXPECT_GT(r.gamma_star, 0.0);
  EXPECT_GE(r.alpha_star, 0.0);
  EXPECT_GE(r.lmi_min_eigenvalue, -1e-7);
  EXPECT_GE(min_eigenvalue(lmi_matrix(p.pred, p.prob, p.param, r.u_star, r.gamma_star,
                                      r.alpha_star)),
            -1e-7);
  EXPECT_GE(min_eigenvalue(build_qg(p.pred, p.prob, r.u_star, r.gamma_star) -
                           r.alpha_star * p.param.constraint),
            -1e-7);
  EXPECT_GT(r.solve_time, 0.0);
  EXPECT_EQ(r.method, "clarabel");
}

TEST(Solve, MultiplierSearchAgreesWithConic) {
  const Problem& p = example();
  SynthesisOptions options;
  options.method = SynthesisMethod::MultiplierSearch;
  const SynthesisResult m = synthesize(p.pred, p.prob, p.param, options);
  const SynthesisResult& c = example_result();
  ASSERT_TRUE(m.optimal()) << m.detail;
  EXPECT_LE(std::abs(m.gamma_star - c.gamma_star), 1e-5 * c.gamma_star);
  EXPECT_LE((m.u_star - c.u_star).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_GE(m.lmi_min_eigenvalue, -1e-7);
}

TEST(Solve, TighterToleranceAgrees) {
  const Problem& p = example();
  SynthesisOptions options;
  options.sdp.tolerance = 1e-10;
  const SynthesisResult tight = synthesize(p.pred, p.prob, p.param, options);
  ASSERT_TRUE(tight.optimal()) << tight.detail;
  EXPECT_LE(std::abs(tight.gamma_star - example_result().gamma_star),
            1e-5 * example_result().gamma_star);
}

TEST(Solve, ScsBackendAgrees) {
  const Problem& p = example();
  SynthesisOptions options;
  options.backend = make_backend(ConicSolver::Scs);
  const SynthesisResult scs = synthesize(p.pred, p.prob, p.param, options);
  ASSERT_TRUE(scs.optimal()) << scs.detail;
  EXPECT_EQ(scs.method, "scs");
  EXPECT_LE(std::abs(scs.gamma_star - example_result().gamma_star),
            1e-5 * example_result().gamma_star);
}

// Near-zero initial state: the worst case lines up with the top eigenvector
// of the noise gain and the optimal multiplier sits on its eigenvalue.
TEST(Solve, MultiplierOnSpectralEdge) {
  ExperimentConfig config;
  config.seeds.data = 113;
  config.seeds.noise = 213;
  config.epsilon = 2e-3;
  const GeneratedData data = generate_data(config);
  const ProblemSetup setup = setup_problem(config, data.historical.data, data.recent);
  const SynthesisResult conic = synthesize(setup.predictor, setup.problem, setup.param);
  SynthesisOptions options;
  options.method = SynthesisMethod::MultiplierSearch;
  const SynthesisResult search = synthesize(setup.predictor, setup.problem, setup.param, options);
  ASSERT_TRUE(conic.optimal()) << conic.detail;
  ASSERT_TRUE(search.optimal()) << search.detail;
  const ReducedProblem rp = reduce_problem(setup.predictor, setup.problem, setup.param);
  const double mu_max =
      max_eigenvalue(rp.noise_gain.transpose() * rp.q_bar * rp.noise_gain);
  EXPECT_NEAR(search.alpha_star, mu_max, 1e-6 * mu_max);
  EXPECT_LE(std::abs(search.gamma_star - conic.gamma_star), 1e-5 * conic.gamma_star);
  for (const SynthesisResult* r : {&conic, &search}) {
    const WorstCase wc = worst_case_cost(setup.predictor, setup.problem, setup.param, r->u_star);
    EXPECT_TRUE(is_feasible_gw(setup.param, wc.g_w, 1e-9));
    EXPECT_LE(wc.gamma, r->gamma_star * (1.0 + 1e-6));
    EXPECT_GE(wc.gamma, 0.99 * r->gamma_star);
  }
}

TEST(Solve, SampledCostsStayBelowBound) {
  const Problem& p = example();
  const SynthesisResult& r = example_result();
  for (const Vector& g : sample_feasible_gw(p.param, 200, 21)) {
    EXPECT_LE(lqte(p.prob, r.u_star, predict(p.pred, r.u_star, g)),
              r.gamma_star * (1.0 + 1e-6));
  }
}

TEST(Solve, MonotoneInNoiseLevel) {
  double previous = 0.0;
  for (double eps : {5e-4, 1e-3, 2e-3}) {
    const Problem p = make_problem(eps, 4e-4);
    const SynthesisResult r = synthesize(p.pred, p.prob, p.param);
    ASSERT_TRUE(r.optimal()) << r.detail;
    EXPECT_GE(r.gamma_star, previous * (1.0 - 1e-6)) << "epsilon " << eps;
    previous = r.gamma_star;
  }
}

// Without noise the problem is a plain LQ tracking problem, solved here by
// least squares on the state-space predictor.
TEST(Solve, NoiselessMatchesLeastSquares) {
  const Problem p = make_problem(0.0, 0.0);
  EXPECT_EQ(p.param.shape(), NoiseSetShape::Point);
  const SynthesisResult r = synthesize(p.pred, p.prob, p.param);
  ASSERT_TRUE(r.optimal()) << r.detail;
  EXPECT_TRUE(std::isinf(r.alpha_star));

  const StateSpacePredictor ss = state_space_predictor(p.s.sys, kFuture);
  Matrix lhs(2 * kFuture, kFuture);
  lhs << ss.toeplitz, Matrix::Identity(kFuture, kFuture);
  Vector rhs(2 * kFuture);
  rhs << -ss.obs * p.s.x_after, Vector::Zero(kFuture);
  const Vector u = lhs.colPivHouseholderQr().solve(rhs);
  const double best = (lhs * u - rhs).squaredNorm();
  EXPECT_LE(std::abs(r.gamma_star - best), 1e-6 * best);
  EXPECT_LT((r.u_star - u).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Solve, EmptyNoiseSetIsInfeasible) {
  Problem p = make_problem(1e-3);
  Vector y = p.y_ini;
  y(1) += 2.0;
  const auto param = build_parameterization(p.s.part, p.s.u_ini, y,
                                            NoiseModel::energy_bound(1e-6, kPast, 1));
  ASSERT_EQ(param.shape(), NoiseSetShape::Empty);
  const auto pred = build_predictor(p.s.part, select_rows(p.s.part), param);
  const SynthesisResult r = synthesize(pred, p.prob, param);
  EXPECT_EQ(r.status, SolverStatus::Infeasible);
  EXPECT_FALSE(std::isfinite(r.gamma_star));
  EXPECT_ERROR_KIND(worst_case_cost(pred, p.prob, param, Vector::Zero(kFuture)),
                    ErrorKind::Infeasible);
}

TEST(Solve, IterationLimitIsReportedAsFailure) {
  const Problem& p = example();
  SynthesisOptions options;
  options.sdp.max_iterations = 5;
  const SynthesisResult r = synthesize(p.pred, p.prob, p.param, options);
  EXPECT_EQ(r.status, SolverStatus::NumericalFailure);
}

TEST(Solve, BadBackendAnswerFailsCertificate) {
  const Problem& p = example();
  SynthesisOptions options;
  options.backend = std::make_shared<GarbageBackend>();
  const SynthesisResult r = synthesize(p.pred, p.prob, p.param, options);
  EXPECT_EQ(r.status, SolverStatus::NumericalFailure);
  EXPECT_NE(r.detail.find("certificate"), std::string::npos);
}

TEST(WorstCase, TightAtOptimum) {
  const Problem& p = example();
  const SynthesisResult& r = example_result();
  const WorstCase wc = worst_case_cost(p.pred, p.prob, p.param, r.u_star);
  EXPECT_GE(wc.gamma, 0.99 * r.gamma_star);
  EXPECT_LE(wc.gamma, r.gamma_star * (1.0 + 1e-6));
  EXPECT_TRUE(is_feasible_gw(p.param, wc.g_w, 1e-8));
  EXPECT_NEAR(lqte(p.prob, r.u_star, predict(p.pred, r.u_star, wc.g_w)), wc.gamma,
              1e-9 * wc.gamma);
}

TEST(WorstCase, ZeroInputIsWorse) {
  const Problem& p = example();
  EXPECT_GE(worst_case_cost(p.pred, p.prob, p.param, Vector::Zero(kFuture)).gamma,
            example_result().gamma_star);
}

TEST(WorstCase, DominatesSamples) {
  const Problem& p = example();
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector u = gaussian(kFuture, rng);
    const double wc = worst_case_cost(p.pred, p.prob, p.param, u).gamma;
    for (const Vector& g : sample_feasible_gw(p.param, 100, static_cast<std::uint64_t>(trial))) {
      EXPECT_LE(lqte(p.prob, u, predict(p.pred, u, g)), wc * (1.0 + 1e-9));
    }
  }
}

TEST(WorstCase, PointSetEvaluatesCenter) {
  const Problem p = make_problem(0.0, 0.0);
  ASSERT_EQ(p.param.shape(), NoiseSetShape::Point);
  std::mt19937_64 rng(2);
  const Vector u = gaussian(kFuture, rng);
  const WorstCase wc = worst_case_cost(p.pred, p.prob, p.param, u);
  EXPECT_NEAR(wc.gamma, lqte(p.prob, u, predict(p.pred, u, p.param.center_gw())),
              1e-9 * std::max(1.0, wc.gamma));
}

TEST(UnitBall, KktConditionsOnRandomInstances) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Index r = 1 + trial % 6;
    Matrix g = gaussian(r, r, rng);
    g = (g + g.transpose()).eval();
    if (trial % 3 == 0) g = -(g * g.transpose()).eval();  // concave cases
    const Vector h = (trial % 7 == 0 ? 0.01 : 1.0) * gaussian(r, rng);
    const BallMaximum best = maximize_on_unit_ball(g, h);
    const double lambda = best.multiplier;
    EXPECT_LE(best.s.norm(), 1.0 + 1e-9);
    EXPECT_GE(lambda, -1e-12);
    EXPECT_LT(((lambda * Matrix::Identity(r, r) - g) * best.s - h).norm(), 1e-8);
    EXPECT_GE(min_eigenvalue(lambda * Matrix::Identity(r, r) - g), -1e-8);
    EXPECT_LT(lambda * (1.0 - best.s.norm()), 1e-8);
    for (int k = 0; k < 50; ++k) {
      Vector s = gaussian(r, rng).normalized();
      if (k % 2 == 1) s *= std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      EXPECT_LE(s.dot(g * s) + 2.0 * h.dot(s), best.value + 1e-9);
    }
  }
}

TEST(UnitBall, HardCase) {
  Matrix g(2, 2);
  g << 1, 0, 0, 2;
  Vector h(2);
  h << 0.5, 0.0;
  const BallMaximum best = maximize_on_unit_ball(g, h);
  EXPECT_NEAR(best.value, 2.25, 1e-12);
  EXPECT_NEAR(best.s(0), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(best.s(1)), std::sqrt(0.75), 1e-12);
  EXPECT_NEAR(best.multiplier, 2.0, 1e-12);
}

TEST(UnitBall, NearHardCase) {
  Matrix g(2, 2);
  g << 1, 0, 0, 2;
  for (double tiny : {1e-17, 1e-14, 1e-11, 1e-8}) {
    Vector h(2);
    h << 0.5, tiny;
    const BallMaximum best = maximize_on_unit_ball(g, h);
    EXPECT_LE(best.s.norm(), 1.0 + 1e-12) << tiny;
    EXPECT_NEAR(best.value, 2.25, 1e-7) << tiny;
    EXPECT_GT(best.s(1), 0.0) << tiny;
  }
}

TEST(UnitBall, InteriorAndEmpty) {
  Matrix g = -Matrix::Identity(2, 2) * 4.0;
  Vector h(2);
  h << 1.0, -2.0;
  const BallMaximum best = maximize_on_unit_ball(g, h);
  EXPECT_LT((best.s - h / 4.0).norm(), 1e-12);
  EXPECT_EQ(best.multiplier, 0.0);
  EXPECT_EQ(maximize_on_unit_ball(Matrix(0, 0), Vector(0)).s.size(), 0);
  const BallMaximum zero = maximize_on_unit_ball(Matrix::Identity(3, 3), Vector::Zero(3));
  EXPECT_NEAR(zero.value, 1.0, 1e-12);
}
