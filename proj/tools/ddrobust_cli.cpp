// Command-line front end: generate, synthesize, validate, run, rhc.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddrobust/error.hpp"
#include "ddrobust/experiment.hpp"
#include "ddrobust/json_io.hpp"
#include "ddrobust/plots.hpp"
#include "ddrobust/receding_horizon.hpp"
#include "ddrobust/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace ddrobust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolver = 3;

int exit_code(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return kExitOk;
    case SolverStatus::Infeasible: return kExitInfeasible;
    default: return kExitSolver;
  }
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Infeasible: return kExitInfeasible;
    case ErrorKind::NumericalFailure: return kExitSolver;
    default: return kExitOther;
  }
}

struct CommonArgs {
  std::string config;
  std::vector<std::string> seeds;
  std::string out = "out";
};

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig config = args.config.empty() ? ExperimentConfig{} : load_config(args.config);
  for (const std::string& item : args.seeds) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "--seed expects NAME=INT, got '" + item + "'");
    }
    std::uint64_t value = 0;
    const char* first = item.data() + eq + 1;
    const char* last = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
      throw Error(ErrorKind::InvalidArgument, "--seed value in '" + item + "' is not an integer");
    }
    config.seeds.set(item.substr(0, eq), value);
  }
  return config;
}

fs::path out_dir(const CommonArgs& args) {
  fs::path dir = args.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  body(out);
  if (!out.flush()) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void print_result(const SynthesisResult& r) {
  std::cout << "status      " << to_string(r.status) << '\n'
            << "gamma*      " << format_number(r.gamma_star) << '\n'
            << "alpha*      " << format_number(r.alpha_star) << '\n'
            << "method      " << r.method << '\n'
            << "solve time  " << r.solve_time << " s\n";
  if (!r.detail.empty()) std::cout << "detail      " << r.detail << '\n';
}

int cmd_generate(const CommonArgs& args) {
  const ExperimentConfig config = load(args);
  const fs::path dir = out_dir(args);
  const GeneratedData data = generate_data(config);
  write_trajectory_csv(dir / "historical.csv", data.historical.data);
  write_trajectory_csv(dir / "recent.csv", data.recent);
  write_trajectory_csv(dir / "recent_true.csv", data.recent_true);
  write_json(dir / "generate.json",
             {{"config", config_to_json(config)},
              {"initial_state", vector_to_json(data.historical.initial_state)},
              {"state_after_recent", vector_to_json(data.state)},
              {"injected_noise", vector_to_json(data.injected_noise)}});
  std::cout << "wrote " << (dir / "historical.csv").string() << ", "
            << (dir / "recent.csv").string() << '\n';
  return kExitOk;
}

int cmd_synthesize(const CommonArgs& args, const std::string& data_path,
                   const std::string& recent_path, bool export_predictor) {
  const ExperimentConfig config = load(args);
  const fs::path dir = out_dir(args);
  const ProblemSetup setup = setup_problem(config, read_trajectory_csv(data_path),
                                           read_trajectory_csv(recent_path));
  const SynthesisResult result =
      synthesize(setup.predictor, setup.problem, setup.param, config.synthesis_options());
  write_json(dir / "result.json", result_to_json(result));
  if (export_predictor) write_json(dir / "predictor.json", predictor_to_json(setup.predictor));
  print_result(result);
  return exit_code(result.status);
}

int cmd_validate(const CommonArgs& args, const std::string& result_path,
                 const std::string& data_path, const std::string& recent_path, Index samples) {
  const ExperimentConfig config = load(args);
  const SynthesisResult result = result_from_json(read_json(result_path));
  if (!result.optimal()) {
    std::cerr << "result status is " << to_string(result.status) << ", nothing to validate\n";
    return exit_code(result.status);
  }
  const fs::path dir = out_dir(args);
  const ProblemSetup setup = setup_problem(config, read_trajectory_csv(data_path),
                                           read_trajectory_csv(recent_path));
  const Index count = samples >= 0 ? samples : config.samples;
  const Validation v = validate_controller(setup, result.u_star, count, config.seeds.validation);
  write_file(dir / "costs.csv", [&](std::ostream& o) { write_costs_csv(o, v.costs, result.gamma_star); });
  write_file(dir / "outputs.csv",
             [&](std::ostream& o) { write_outputs_csv(o, v.outputs, config.system.outputs()); });
  std::cout << "samples           " << v.costs.size() << '\n'
            << "max realized cost " << format_number(v.max_cost) << '\n'
            << "worst-case cost   " << format_number(v.worst_case.gamma) << '\n'
            << "gamma*            " << format_number(result.gamma_star) << '\n';
  return kExitOk;
}

int cmd_run(const CommonArgs& args, bool svg) {
  const ExperimentConfig config = load(args);
  const fs::path dir = out_dir(args);
  const ExperimentReport report = run_experiment(config);
  write_trajectory_csv(dir / "historical.csv", report.data.historical.data);
  write_trajectory_csv(dir / "recent.csv", report.data.recent);
  write_json(dir / "report.json", report_to_json(report));
  emit_plots(report, dir, PlotOptions{svg});
  print_result(report.synthesis);
  if (report.validation) {
    std::cout << "max realized cost " << format_number(report.validation->max_cost) << " over "
              << report.validation->costs.size() << " samples\n"
              << "worst-case cost   " << format_number(report.validation->worst_case.gamma)
              << '\n';
  }
  return exit_code(report.synthesis.status);
}

int cmd_rhc(const CommonArgs& args, Index steps) {
  const ExperimentConfig config = load(args);
  const fs::path dir = out_dir(args);
  const RecedingHorizonLog log =
      run_receding_horizon(config.system, config, steps, config.seeds.noise);
  write_file(dir / "rhc.csv", [&](std::ostream& o) { write_receding_horizon_csv(o, log); });
  write_json(dir / "rhc.json", receding_horizon_to_json(log));
  std::cout << "steps " << log.steps.size() << '\n';
  if (log.aborted) {
    std::cerr << "aborted: " << log.failure << '\n';
    return exit_code(log.failure_status);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust data-driven tracking control from input/output data"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonArgs common;
  app.add_option("--config", common.config, "Experiment config (JSON)");
  app.add_option("--seed", common.seeds, "Seed override NAME=INT (data, recent, noise, validation)");
  app.add_option("--out", common.out, "Output directory")->capture_default_str();

  std::string data_path;
  std::string recent_path;
  std::string result_path;
  Index samples = -1;
  Index steps = 30;
  bool export_predictor = false;
  bool no_svg = false;

  auto* generate = app.add_subcommand("generate", "Write historical and recent data CSVs");
  auto* synth = app.add_subcommand("synthesize", "Solve the robust problem from data CSVs");
  synth->add_option("--data", data_path, "Historical data CSV (default OUT/historical.csv)");
  synth->add_option("--recent", recent_path, "Recent window CSV (default OUT/recent.csv)");
  synth->add_flag("--export-predictor", export_predictor, "Also write predictor.json");
  auto* validate = app.add_subcommand("validate", "Monte-Carlo check of a result");
  validate->add_option("--result", result_path, "Result JSON (default OUT/result.json)");
  validate->add_option("--data", data_path, "Historical data CSV (default OUT/historical.csv)");
  validate->add_option("--recent", recent_path, "Recent window CSV (default OUT/recent.csv)");
  validate->add_option("--samples", samples, "Number of noise samples (default from config)");
  auto* run = app.add_subcommand("run", "Full pipeline with report, CSVs and charts");
  run->add_flag("--no-svg", no_svg, "Skip SVG charts");
  auto* rhc = app.add_subcommand("rhc", "Receding-horizon closed loop");
  rhc->add_option("--steps", steps, "Number of closed-loop steps")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  auto or_default = [&](const std::string& value, const char* name) {
    return value.empty() ? (fs::path(common.out) / name).string() : value;
  };
  try {
    if (*generate) return cmd_generate(common);
    if (*synth) {
      return cmd_synthesize(common, or_default(data_path, "historical.csv"),
                            or_default(recent_path, "recent.csv"), export_predictor);
    }
    if (*validate) {
      return cmd_validate(common, or_default(result_path, "result.json"),
                          or_default(data_path, "historical.csv"),
                          or_default(recent_path, "recent.csv"), samples);
    }
    if (*run) return cmd_run(common, !no_svg);
    if (*rhc) return cmd_rhc(common, steps);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
