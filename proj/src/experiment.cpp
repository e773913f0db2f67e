#include "ddrobust/experiment.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "ddrobust/error.hpp"

namespace ddrobust {

namespace {

template <class F>
auto stage(std::string_view name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.within(name);
  }
}

}  // namespace

void SeedSet::set(const std::string& name, std::uint64_t value) {
  if (name == "data") {
    data = value;
  } else if (name == "recent") {
    recent = value;
  } else if (name == "noise") {
    noise = value;
  } else if (name == "validation") {
    validation = value;
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "unknown seed '" + name + "' (expected data, recent, noise or validation)");
  }
}

Vector ExperimentConfig::reference_vector() const {
  if (reference) return *reference;
  return Vector::Zero(system.outputs() * future);
}

NoiseModel ExperimentConfig::noise_model() const {
  return NoiseModel::energy_bound(epsilon, past, system.outputs());
}

TrackingProblem ExperimentConfig::tracking_problem() const {
  return TrackingProblem(reference_vector(), q_weight, r_weight, future);
}

SynthesisOptions ExperimentConfig::synthesis_options() const {
  SynthesisOptions options;
  options.method = solver.method;
  options.backend = make_backend(solver.backend);
  options.sdp.tolerance = solver.tolerance;
  options.sdp.max_iterations = solver.max_iterations;
  return options;
}

void ExperimentConfig::validate() const {
  if (past < 1 || future < 1) {
    throw Error(ErrorKind::InvalidArgument, "T_ini and T_e must be >= 1");
  }
  if (past + future > data_length) {
    throw Error(ErrorKind::Dimension, "T_ini + T_e must not exceed T_d");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must be finite and >= 0");
  }
  if (samples < 0) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 0");
  if (!(input_amplitude >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "input amplitude must be >= 0");
  }
  expect_size(q_weight.rows(), system.outputs(), "q_weight rows");
  expect_size(q_weight.cols(), system.outputs(), "q_weight cols");
  expect_size(r_weight.rows(), system.inputs(), "r_weight rows");
  expect_size(r_weight.cols(), system.inputs(), "r_weight cols");
  if (reference) expect_size(reference->size(), system.outputs() * future, "reference");
}

Vector draw_injected_noise(const HankelPartition& part, const Vector& u_ini,
                           const Vector& y_true, const NoiseModel& noise,
                           std::mt19937_64& rng) {
  const NoiseParameterization param = build_parameterization(part, u_ini, y_true, noise);
  return noise_from_gw(param, sample_feasible_gw(param, 1, rng).front());
}

GeneratedData generate_data(const ExperimentConfig& config) {
  config.validate();
  const LtiSystem& sys = config.system;
  GeneratedData out;
  out.historical =
      generate_historical(sys, config.data_length, config.input_amplitude, config.seeds.data);
  Matrix u_rec = random_inputs(sys.inputs(), config.past, config.input_amplitude,
                               config.seeds.recent);
  SimulationRun run = simulate_run(sys, out.historical.final_state, u_rec);
  out.state = run.final_state;
  out.recent_true = TrajectoryData(u_rec, run.y);

  const Index d = sys.outputs() * config.past;
  out.injected_noise = Vector::Zero(d);
  // The plant order is known here, so the excitation requirement is checked
  // on the generated data; the controller side never sees n.
  const HankelPartition part = partition(out.historical.data, config.horizons(), sys.states());
  if (config.inject_noise) {
    std::mt19937_64 rng(config.seeds.noise);
    out.injected_noise = draw_injected_noise(part, stack_columns(u_rec), stack_columns(run.y),
                                             config.noise_model(), rng);
  }
  out.recent = TrajectoryData(std::move(u_rec),
                              run.y + unstack(out.injected_noise, sys.outputs()));
  return out;
}

ProblemSetup setup_problem(const ExperimentConfig& config, const TrajectoryData& historical,
                           const TrajectoryData& recent) {
  config.validate();
  expect_size(historical.inputs(), config.system.inputs(), "historical inputs");
  expect_size(historical.outputs(), config.system.outputs(), "historical outputs");
  expect_size(historical.length(), config.data_length, "historical length");
  expect_size(recent.inputs(), config.system.inputs(), "recent inputs");
  expect_size(recent.outputs(), config.system.outputs(), "recent outputs");
  expect_size(recent.length(), config.past, "recent length");

  HankelPartition part = stage("partition", [&] {
    return partition(historical, config.horizons());
  });
  Vector u_ini = stack_columns(recent.u);
  Vector y_ini = stack_columns(recent.y);
  NoiseModel noise = config.noise_model();
  NoiseParameterization param = stage("noise parameterization", [&] {
    return build_parameterization(part, u_ini, y_ini, noise);
  });
  OutputPredictor pred = stage("predictor", [&] {
    return build_predictor(part, select_rows(part), param);
  });
  TrackingProblem problem = stage("tracking problem", [&] { return config.tracking_problem(); });
  return {std::move(part), std::move(u_ini), std::move(y_ini), std::move(noise),
          std::move(param), std::move(pred), std::move(problem)};
}

Validation validate_controller(const ProblemSetup& setup, const Vector& u_star, Index samples,
                               std::uint64_t seed) {
  Validation out;
  for (const Vector& g : sample_feasible_gw(setup.param, samples, seed)) {
    Vector y = predict(setup.predictor, u_star, g);
    out.costs.push_back(lqte(setup.problem, u_star, y));
    out.outputs.push_back(std::move(y));
    out.max_cost = std::max(out.max_cost, out.costs.back());
  }
  out.worst_case = worst_case_cost(setup.predictor, setup.problem, setup.param, u_star);
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  stage("config", [&] {
    config.validate();
    return 0;
  });
  ExperimentReport report;
  report.config = config;
  report.data = stage("generate", [&] { return generate_data(config); });
  const ProblemSetup setup = setup_problem(config, report.data.historical.data, report.data.recent);
  report.selected_rows = setup.predictor.selected_rows;
  report.gram_condition = setup.predictor.gram_condition;
  report.noise_dimension = setup.param.free_dimension();
  report.reduced_noise_dimension = setup.param.reduced_dimension();
  report.noise_shape = setup.param.shape();

  report.synthesis = stage("synthesis", [&] {
    return synthesize(setup.predictor, setup.problem, setup.param, config.synthesis_options());
  });
  if (report.synthesis.optimal()) {
    const Vector& u = report.synthesis.u_star;
    report.validation = stage("validation", [&] {
      return validate_controller(setup, u, config.samples, config.seeds.validation);
    });
    report.plant_output = simulate(config.system, report.data.state,
                                   unstack(u, config.system.inputs()));
    report.plant_cost = lqte(setup.problem, u, stack_columns(report.plant_output));
  }
  report.total_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ddrobust
