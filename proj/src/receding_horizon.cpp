#include "ddrobust/receding_horizon.hpp"

#include <random>

#include "ddrobust/error.hpp"

namespace ddrobust {

namespace {

SolverStatus status_for(const Error& e) {
  return e.kind() == ErrorKind::Infeasible ? SolverStatus::Infeasible
                                           : SolverStatus::NumericalFailure;
}

}  // namespace

RecedingHorizonLog run_receding_horizon(const LtiSystem& plant, const ExperimentConfig& config,
                                        Index steps, std::uint64_t seed) {
  RecedingHorizonLog log;
  if (steps <= 0) return log;
  ExperimentConfig cfg = config;
  cfg.system = plant;
  cfg.validate();

  const Index m = plant.inputs();
  const Index p = plant.outputs();
  const GeneratedTrajectory hist =
      generate_historical(plant, cfg.data_length, cfg.input_amplitude, cfg.seeds.data);
  const HankelPartition part = partition(hist.data, cfg.horizons());
  const NoiseModel noise = cfg.noise_model();
  const SynthesisOptions options = cfg.synthesis_options();

  Matrix u_win = random_inputs(m, cfg.past, cfg.input_amplitude, cfg.seeds.recent);
  SimulationRun run = simulate_run(plant, hist.final_state, u_win);
  Matrix y_win = run.y;
  Vector x = run.final_state;
  log.initial_state = x;
  log.initial_output = y_win;
  std::mt19937_64 rng(seed);

  for (Index k = 0; k < steps; ++k) {
    SynthesisResult res;
    try {
      Matrix y_meas = y_win;
      if (cfg.inject_noise) {
        y_meas += unstack(
            draw_injected_noise(part, stack_columns(u_win), stack_columns(y_win), noise, rng), p);
      }
      const ProblemSetup setup = setup_problem(cfg, hist.data, TrajectoryData(u_win, y_meas));
      res = synthesize(setup.predictor, setup.problem, setup.param, options);
    } catch (const Error& e) {
      res.status = status_for(e);
      res.detail = e.what();
    }
    if (!res.optimal()) {
      log.aborted = true;
      log.failure_status = res.status;
      log.failure = "step " + std::to_string(k) + ": " + to_string(res.status) +
                    (res.detail.empty() ? "" : " (" + res.detail + ")");
      break;
    }

    RecedingHorizonStep entry;
    entry.step = k;
    entry.state = x;
    entry.input = res.u_star.head(m);
    entry.output = plant.c() * x + plant.d() * entry.input;
    entry.gamma_star = res.gamma_star;
    entry.alpha_star = res.alpha_star;
    x = plant.a() * x + plant.b() * entry.input;

    const Index t = cfg.past;
    u_win.leftCols(t - 1) = u_win.rightCols(t - 1).eval();
    y_win.leftCols(t - 1) = y_win.rightCols(t - 1).eval();
    u_win.col(t - 1) = entry.input;
    y_win.col(t - 1) = entry.output;
    log.steps.push_back(std::move(entry));
  }
  return log;
}

}  // namespace ddrobust
