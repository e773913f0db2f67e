// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "ddrobust/experiment.hpp"
#include "ddrobust/plots.hpp"
#include "ddrobust/trajectory_io.hpp"
#include "support.hpp"

using namespace ddrobust;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kBoundSlack = 1e-6;         // realized cost <= gamma* (1 + slack)
constexpr double kTightness = 0.99;          // worst case >= 0.99 gamma*
constexpr double kExampleSeconds = 60.0;
constexpr double kTailRatio = 0.1;           // max_{k >= 15} |y_k| <= 0.1 max_k |y_k|
constexpr Index kTailStart = 15;
constexpr double kOracleError = 1e-6;
constexpr double kOracleSeconds = 120.0;
constexpr double kLeastSquaresRel = 1e-6;
constexpr double kQuadraticFormTol = 1e-8;   // relative to max(1, |gamma|, LQTE)
constexpr double kEigenvalueTol = 1e-8;
constexpr double kNoiseBoundTol = 1e-8;
constexpr double kMembershipTol = 1e-8;
constexpr double kMonotoneSlack = 1e-6;
constexpr double kDeterminismTol = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome check(bool ok, const std::string& detail) { return {ok, detail}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const ExperimentReport& example_report(double* seconds = nullptr) {
  static double elapsed = 0.0;
  static const ExperimentReport report = [] {
    const auto start = Clock::now();
    ExperimentReport r = run_experiment(ExperimentConfig{});
    elapsed = seconds_since(start);
    return r;
  }();
  if (seconds) *seconds = elapsed;
  return report;
}

Outcome criterion_example() {
  double seconds = 0.0;
  const ExperimentReport& r = example_report(&seconds);
  if (!r.synthesis.optimal()) return check(false, "synthesis " + to_string(r.synthesis.status));
  const double gamma = r.synthesis.gamma_star;
  const Validation& v = *r.validation;
  const bool bound = v.costs.size() == 100 && v.max_cost <= gamma * (1.0 + kBoundSlack);
  const bool tight = v.worst_case.gamma >= kTightness * gamma;
  const bool fast = seconds <= kExampleSeconds;
  return check(bound && tight && fast,
               "gamma*=" + fmt(gamma) + " max realized=" + fmt(v.max_cost) +
                   " worst case=" + fmt(v.worst_case.gamma) + " time=" + fmt(seconds) + "s");
}

Outcome criterion_regulation() {
  const ExperimentReport& r = example_report();
  if (!r.validation) return check(false, "no validation");
  const Index p = r.config.system.outputs();
  double worst = 0.0;
  for (const Vector& y : r.validation->outputs) {
    const double peak = y.cwiseAbs().maxCoeff();
    const double tail = y.tail(y.size() - kTailStart * p).cwiseAbs().maxCoeff();
    worst = std::max(worst, tail / peak);
  }
  return check(worst <= kTailRatio, "max tail ratio=" + fmt(worst) + " (seeds data=" +
                                        std::to_string(r.config.seeds.data) + " noise=" +
                                        std::to_string(r.config.seeds.noise) + ")");
}

Outcome criterion_oracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  double sim_error = 0.0;
  double pred_error = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 5;
    const Index m = 1 + (trial / 5) % 2;
    const Index p = 1 + (trial / 10) % 2;
    const LtiSystem sys = random_system(n, m, p, rng);
    const Index past = n;
    const Index future = 8;
    const Scenario s = make_scenario(sys, past, future, (m + 1) * (past + future + n) + 20,
                                     500 + static_cast<std::uint64_t>(trial));

    const Vector x0 = gaussian(n, rng);
    const Matrix u = uniform(m, past + future, 1.0, rng);
    const Matrix y = recursion(sys.a(), sys.b(), sys.c(), sys.d(), x0, u);
    const Vector sim = simulate_ddriven(s.part, stack_columns(u.leftCols(past)),
                                        stack_columns(y.leftCols(past)),
                                        stack_columns(u.rightCols(future)));
    sim_error = std::max(sim_error, (sim - stack_columns(y.rightCols(future))).cwiseAbs().maxCoeff());

    const NoiseModel noise = NoiseModel::energy_bound(1e-3, past, p);
    const Vector y_ini = s.y_ini + draw_injected_noise(s.part, s.u_ini, s.y_ini, noise, rng);
    const auto param = build_parameterization(s.part, s.u_ini, y_ini, noise);
    const auto pred = build_predictor(s.part, select_rows(s.part), param);
    for (const Vector& g : sample_feasible_gw(param, 20, rng)) {
      const Vector uf = gaussian(m * future, rng);
      const Vector expected = simulate_ddriven(s.part, s.u_ini, y_ini - noise_from_gw(param, g), uf);
      pred_error = std::max(pred_error, (predict(pred, uf, g) - expected).cwiseAbs().maxCoeff());
    }
  }
  const double seconds = seconds_since(start);
  return check(sim_error <= kOracleError && pred_error <= kOracleError && seconds <= kOracleSeconds,
               "simulator err=" + fmt(sim_error) + " predictor err=" + fmt(pred_error) +
                   " time=" + fmt(seconds) + "s");
}

Outcome criterion_noiseless() {
  ExperimentConfig config;
  config.epsilon = 0.0;
  config.samples = 0;
  const ExperimentReport r = run_experiment(config);
  if (!r.synthesis.optimal()) return check(false, "synthesis " + to_string(r.synthesis.status));
  const Index te = config.future;
  const StateSpacePredictor ss = state_space_predictor(config.system, te);
  Matrix lhs(2 * te, te);
  lhs << ss.toeplitz, Matrix::Identity(te, te);
  Vector rhs(2 * te);
  rhs << -ss.obs * r.data.state, Vector::Zero(te);
  const Vector u = lhs.colPivHouseholderQr().solve(rhs);
  const double best = (lhs * u - rhs).squaredNorm();
  const double rel = std::abs(r.synthesis.gamma_star - best) / best;
  return check(rel <= kLeastSquaresRel, "gamma*=" + fmt(r.synthesis.gamma_star) +
                                            " least squares=" + fmt(best) + " rel=" + fmt(rel));
}

Outcome criterion_quadratic_forms() {
  ExperimentConfig config;
  const GeneratedData data = generate_data(config);
  const ProblemSetup setup = setup_problem(config, data.historical.data, data.recent);
  const SynthesisResult& opt = example_report().synthesis;
  if (!opt.optimal()) return check(false, "no optimal solution");
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index nw = setup.param.free_dimension();
  const Index nu = config.future;

  double qg_error = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = gaussian(nu, rng);
    const Vector g = gaussian(nw, rng);
    const double gamma = 100.0 * unit(rng);
    Vector z(nw + 1);
    z << 1.0, g;
    const double cost = lqte(setup.problem, u, predict(setup.predictor, u, g));
    const double form = z.dot(build_qg(setup.predictor, setup.problem, u, gamma) * z);
    qg_error = std::max(qg_error, std::abs(form - (gamma - cost)) /
                                      std::max({1.0, std::abs(gamma), cost}));
  }

  int disagreements = 0;
  int feasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = opt.u_star + 0.05 * unit(rng) * gaussian(nu, rng);
    const double gamma = opt.gamma_star * (0.9 + 0.3 * unit(rng));
    const double alpha = opt.alpha_star * (0.5 + 1.5 * unit(rng));
    const double big = min_eigenvalue(
        lmi_matrix(setup.predictor, setup.problem, setup.param, u, gamma, alpha));
    const double small = min_eigenvalue(build_qg(setup.predictor, setup.problem, u, gamma) -
                                        alpha * setup.param.constraint);
    disagreements += (big >= -kEigenvalueTol) != (small >= -kEigenvalueTol);
    feasible += big >= -kEigenvalueTol;
  }
  return check(qg_error <= kQuadraticFormTol && disagreements == 0,
               "Q_g err=" + fmt(qg_error) + " Schur disagreements=" +
                   std::to_string(disagreements) + "/100 (PSD " + std::to_string(feasible) + ")");
}

Outcome criterion_noise_set() {
  ExperimentConfig config;
  const GeneratedData data = generate_data(config);
  const ProblemSetup setup = setup_problem(config, data.historical.data, data.recent);
  double bound_violation = 0.0;
  int outside = 0;
  for (const Vector& g : sample_feasible_gw(setup.param, 1000, 31)) {
    const Vector w = noise_from_gw(setup.param, g);
    bound_violation = std::max(bound_violation, -setup.noise.evaluate(w));
    outside += !is_trajectory(setup.partition, setup.u_ini, setup.y_ini - w, kMembershipTol);
  }

  // One measured window for every level, with noise admissible at the smallest.
  const std::vector<double> levels = {0.0005, 0.001, 0.002};
  ExperimentConfig smallest = config;
  smallest.epsilon = levels.front();
  std::mt19937_64 rng(config.seeds.noise);
  const Vector y_true = stack_columns(data.recent_true.y);
  const Vector w = draw_injected_noise(setup.partition, setup.u_ini, y_true,
                                       smallest.noise_model(), rng);
  const TrajectoryData measured(data.recent.u, unstack(y_true + w, data.recent.y.rows()));
  std::vector<double> gammas;
  for (double eps : levels) {
    ExperimentConfig c = config;
    c.epsilon = eps;
    const ProblemSetup s = setup_problem(c, data.historical.data, measured);
    gammas.push_back(synthesize(s.predictor, s.problem, s.param, c.synthesis_options()).gamma_star);
  }
  const bool monotone = gammas[0] <= gammas[1] * (1.0 + kMonotoneSlack) &&
                        gammas[1] <= gammas[2] * (1.0 + kMonotoneSlack);
  return check(bound_violation <= kNoiseBoundTol && outside == 0 && monotone,
               "bound violation=" + fmt(std::max(0.0, bound_violation)) +
                   " non-trajectories=" + std::to_string(outside) + "/1000 gamma*(eps)=" +
                   fmt(gammas[0]) + "," + fmt(gammas[1]) + "," + fmt(gammas[2]));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_determinism() {
  const ExperimentReport& first = example_report();
  const ExperimentReport second = run_experiment(ExperimentConfig{});
  const double du = (first.synthesis.u_star - second.synthesis.u_star).cwiseAbs().maxCoeff();
  const fs::path root = fs::temp_directory_path() / "ddrobust_acceptance";
  fs::remove_all(root);
  int differing = 0;
  std::vector<fs::path> dirs;
  for (const ExperimentReport* r : {&first, &second}) {
    const fs::path dir = root / std::to_string(dirs.size());
    emit_plots(*r, dir, {.svg = false});
    write_trajectory_csv(dir / "historical.csv", r->data.historical.data);
    write_trajectory_csv(dir / "recent.csv", r->data.recent);
    dirs.push_back(dir);
  }
  for (const char* name : {"outputs.csv", "costs.csv", "historical.csv", "recent.csv"}) {
    differing += slurp(dirs[0] / name) != slurp(dirs[1] / name);
  }
  fs::remove_all(root);
  return check(du <= kDeterminismTol && differing == 0,
               "max |du*|=" + fmt(du) + " differing CSVs=" + std::to_string(differing) + "/4");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 example certified and tight", criterion_example},
      {"2 output regulation", criterion_regulation},
      {"3 oracle equivalence", criterion_oracles},
      {"4 noiseless least squares", criterion_noiseless},
      {"5 quadratic form exactness", criterion_quadratic_forms},
      {"6 noise set soundness", criterion_noise_set},
      {"7 determinism", criterion_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
