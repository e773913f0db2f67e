#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddrobust/experiment.hpp"
#include "ddrobust/json_io.hpp"
#include "ddrobust/plots.hpp"
#include "ddrobust/receding_horizon.hpp"
#include "ddrobust/trajectory_io.hpp"
#include "support.hpp"

using namespace ddrobust;
namespace fs = std::filesystem;

namespace {

const ExperimentReport& default_report() {
  static const ExperimentReport r = run_experiment(ExperimentConfig{});
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ddrobust_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Index count_lines(const fs::path& path) {
  const std::string text = slurp(path);
  return static_cast<Index>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Config, DefaultsMatchExampleSetup) {
  const ExperimentConfig c;
  EXPECT_EQ(c.data_length, 100);
  EXPECT_EQ(c.past, 4);
  EXPECT_EQ(c.future, 20);
  EXPECT_DOUBLE_EQ(c.noise_model().phi11(), 4e-3);
  EXPECT_EQ(c.reference_vector(), Vector::Zero(20));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesJson) {
  const Json j = Json::parse(R"({
    "T_d": 60, "T_ini": 3, "T_e": 10, "epsilon": 0.002,
    "q_weight": 2.0, "r_weight": [[0.5]], "reference": [1,1,1,1,1,1,1,1,1,1],
    "n_samples": 5, "input_amplitude": 0.5, "inject_noise": false,
    "seeds": {"data": 1, "validation": 4},
    "solver": {"method": "multiplier", "backend": "scs", "tolerance": 1e-9,
               "max_iterations": 100}
  })");
  const ExperimentConfig c = config_from_json(j);
  EXPECT_EQ(c.data_length, 60);
  EXPECT_EQ(c.past, 3);
  EXPECT_EQ(c.future, 10);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.002);
  EXPECT_DOUBLE_EQ(c.q_weight(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(c.r_weight(0, 0), 0.5);
  ASSERT_TRUE(c.reference.has_value());
  EXPECT_EQ(*c.reference, Vector::Ones(10));
  EXPECT_EQ(c.samples, 5);
  EXPECT_FALSE(c.inject_noise);
  EXPECT_EQ(c.seeds.data, 1u);
  EXPECT_EQ(c.seeds.recent, 11u);
  EXPECT_EQ(c.seeds.validation, 4u);
  EXPECT_EQ(c.solver.method, SynthesisMethod::MultiplierSearch);
  EXPECT_EQ(c.solver.max_iterations, 100);
  EXPECT_EQ(c.solver.backend, ConicSolver::Scs);
  EXPECT_EQ(ExperimentConfig{}.solver.backend, ConicSolver::Clarabel);
}

TEST(Config, RejectsBadInput) {
  EXPECT_ERROR_KIND(config_from_json(Json::parse(R"({"T_dd": 10})")),
                    ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(config_from_json(Json::parse(R"({"solver": {"method": "ipm"}})")),
                    ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(config_from_json(Json::parse(R"({"solver": {"backend": "mosek"}})")),
                    ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(config_from_json(Json::parse(R"({"epsilon": -1})")),
                    ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(config_from_json(Json::parse(R"({"T_d": 20})")), ErrorKind::Dimension);
  EXPECT_ERROR_KIND(config_from_json(Json::parse(R"({"reference": [1, 2]})")),
                    ErrorKind::Dimension);
  SeedSet seeds;
  EXPECT_ERROR_KIND(seeds.set("bogus", 1), ErrorKind::InvalidArgument);
  seeds.set("noise", 99);
  EXPECT_EQ(seeds.noise, 99u);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.epsilon = 0.0025;
  c.seeds.validation = 123;
  c.reference = Vector::LinSpaced(20, 0.0, 1.0);
  c.solver.method = SynthesisMethod::MultiplierSearch;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.system.a(), c.system.a());
  EXPECT_EQ(*back.reference, *c.reference);
}

TEST(Config, SystemFromRelativePath) {
  const fs::path dir = scratch_dir("system_path");
  std::ofstream(dir / "plant.json") << R"({"A": [[0.5]], "B": [[1]], "C": [[1]]})";
  const ExperimentConfig c =
      config_from_json(Json::parse(R"({"system": "plant.json", "T_d": 30, "T_ini": 2,
                                       "T_e": 5})"),
                       dir);
  EXPECT_EQ(c.system.states(), 1);
  EXPECT_EQ(c.system.d(), Matrix::Zero(1, 1));
}

TEST(JsonIo, SystemAndNoise) {
  const LtiSystem sys = system_from_json(
      Json::parse(R"({"A": [[0, 1], [-0.2, 0.9]], "B": [[0], [1]], "C": [[1, 0]]})"));
  EXPECT_EQ(sys.d(), Matrix::Zero(1, 1));
  EXPECT_DOUBLE_EQ(sys.a()(1, 0), -0.2);
  EXPECT_EQ(system_to_json(sys)["D"], Json::parse("[[0.0]]"));
  EXPECT_ERROR_KIND(system_from_json(Json::parse(R"({"A": [[1]], "B": [[1]]})")),
                    ErrorKind::InvalidArgument);

  const NoiseModel n = noise_from_json(
      Json::parse(R"({"phi11": 0.5, "phi12": [0.1, 0], "phi22": [[-1, 0], [0, -2]]})"));
  EXPECT_DOUBLE_EQ(n.phi11(), 0.5);
  EXPECT_DOUBLE_EQ(n.phi12()(0), 0.1);
  EXPECT_DOUBLE_EQ(n.phi22()(1, 1), -2.0);
  const NoiseModel nested =
      noise_from_json(Json::parse(R"({"phi11": 0.5, "phi12": [[0.1, 0]], "phi22": [[-1, 0], [0, -2]]})"));
  EXPECT_EQ(nested.phi12(), n.phi12());
  EXPECT_ANY_THROW(noise_from_json(Json::parse(R"({"phi11": 1, "phi12": [0], "phi22": [[1]]})")));
}

TEST(JsonIo, ResultRoundTrip) {
  SynthesisResult r;
  r.u_star = Vector::LinSpaced(3, -1.0, 1.0);
  r.gamma_star = 2.5;
  r.alpha_star = std::numeric_limits<double>::infinity();
  r.status = SolverStatus::Optimal;
  r.method = "pinned";
  const Json j = result_to_json(r);
  EXPECT_TRUE(j["alpha_star"].is_null());
  const SynthesisResult back = result_from_json(j);
  EXPECT_EQ(back.u_star, r.u_star);
  EXPECT_EQ(back.gamma_star, 2.5);
  EXPECT_TRUE(std::isnan(back.alpha_star));
  EXPECT_EQ(back.status, SolverStatus::Optimal);
  EXPECT_EQ(back.method, "pinned");
  EXPECT_ERROR_KIND(result_from_json(Json::parse(R"({"u_star": [1]})")),
                    ErrorKind::InvalidArgument);
}

TEST(Experiment, DefaultRunIsCertified) {
  const ExperimentReport& r = default_report();
  ASSERT_TRUE(r.synthesis.optimal()) << r.synthesis.detail;
  ASSERT_TRUE(r.validation.has_value());
  const Validation& v = *r.validation;
  EXPECT_EQ(v.costs.size(), 100u);
  EXPECT_EQ(v.outputs.size(), 100u);
  EXPECT_LE(v.max_cost, r.synthesis.gamma_star * (1.0 + 1e-6));
  EXPECT_EQ(v.max_cost, *std::max_element(v.costs.begin(), v.costs.end()));
  EXPECT_GE(v.worst_case.gamma, 0.99 * r.synthesis.gamma_star);
  EXPECT_EQ(r.noise_dimension, 73);
  EXPECT_EQ(r.reduced_noise_dimension, 3);
  EXPECT_EQ(r.noise_shape, NoiseSetShape::Ellipsoid);
  EXPECT_EQ(r.selected_rows.size(), 3u);
  EXPECT_EQ(r.plant_output.rows(), 1);
  EXPECT_EQ(r.plant_output.cols(), 20);
  EXPECT_TRUE(std::isfinite(r.plant_cost));
  EXPECT_GT(r.total_time, 0.0);
}

TEST(Experiment, InjectedNoiseIsFeasible) {
  const ExperimentReport& r = default_report();
  const GeneratedData& d = r.data;
  EXPECT_EQ(d.recent.y - d.recent_true.y, unstack(d.injected_noise, 1));
  EXPECT_GE(ExperimentConfig{}.noise_model().evaluate(d.injected_noise), -1e-12);
  EXPECT_GT(d.injected_noise.norm(), 0.0);
  const HankelPartition part = partition(d.historical.data, {4, 20}, 3);
  EXPECT_TRUE(is_trajectory(part, stack_columns(d.recent.u),
                            stack_columns(d.recent.y) - d.injected_noise, 1e-8));
}

TEST(Experiment, RunsAreDeterministic) {
  const ExperimentReport again = run_experiment(ExperimentConfig{});
  const ExperimentReport& first = default_report();
  EXPECT_LE((again.synthesis.u_star - first.synthesis.u_star).cwiseAbs().maxCoeff(), 1e-9);
  const fs::path a = scratch_dir("det_a");
  const fs::path b = scratch_dir("det_b");
  emit_plots(first, a);
  emit_plots(again, b);
  for (const char* name : {"outputs.csv", "costs.csv", "outputs.svg", "costs.svg"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(Experiment, NoiselessCostsEqualBound) {
  ExperimentConfig c;
  c.epsilon = 0.0;
  c.samples = 10;
  const ExperimentReport r = run_experiment(c);
  ASSERT_TRUE(r.synthesis.optimal());
  EXPECT_EQ(r.noise_shape, NoiseSetShape::Point);
  EXPECT_EQ(r.synthesis.method, "pinned");
  for (double cost : r.validation->costs) {
    EXPECT_NEAR(cost, r.synthesis.gamma_star, 1e-6 * r.synthesis.gamma_star);
  }
  // With exact data the predicted response is the plant response.
  EXPECT_NEAR(r.plant_cost, r.synthesis.gamma_star, 1e-6 * r.synthesis.gamma_star);
}

TEST(Experiment, ZeroSamplesGiveHeaderOnlyCsv) {
  ExperimentConfig c;
  c.samples = 0;
  c.solver.method = SynthesisMethod::MultiplierSearch;
  const ExperimentReport r = run_experiment(c);
  ASSERT_TRUE(r.validation.has_value());
  EXPECT_TRUE(r.validation->costs.empty());
  const fs::path dir = scratch_dir("zero_samples");
  emit_plots(r, dir, {.svg = false});
  EXPECT_EQ(count_lines(dir / "outputs.csv"), 1);
  EXPECT_EQ(count_lines(dir / "costs.csv"), 1);
  EXPECT_FALSE(fs::exists(dir / "outputs.svg"));
}

TEST(Experiment, CsvRowCounts) {
  const fs::path dir = scratch_dir("rows");
  emit_plots(default_report(), dir);
  EXPECT_EQ(count_lines(dir / "outputs.csv"), 1 + 100 * 20);
  EXPECT_EQ(count_lines(dir / "costs.csv"), 1 + 100);
  EXPECT_EQ(slurp(dir / "costs.csv").substr(0, 27), "realization,cost,gamma_star");
  EXPECT_NE(slurp(dir / "outputs.svg").find("<svg"), std::string::npos);
}

TEST(Experiment, StageErrorsAreLabelled) {
  ExperimentConfig c;
  c.data_length = 30;  // too short for persistent excitation
  try {
    run_experiment(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PersistentExcitation);
    EXPECT_NE(std::string(e.what()).find("generate"), std::string::npos);
  }
}

TEST(Experiment, ReportJson) {
  const Json j = report_to_json(default_report());
  EXPECT_EQ(j["synthesis"]["status"], "optimal");
  EXPECT_EQ(j["synthesis"]["u_star"].size(), 20u);
  EXPECT_TRUE(j.contains("config"));
}

TEST(RecedingHorizon, ZeroStepsIsEmpty) {
  const RecedingHorizonLog log = run_receding_horizon(reference_plant(), ExperimentConfig{}, 0, 1);
  EXPECT_TRUE(log.steps.empty());
  EXPECT_FALSE(log.aborted);
}

TEST(RecedingHorizon, FirstStepMatchesBatchWithoutNoise) {
  ExperimentConfig c;
  c.epsilon = 0.0;
  c.samples = 0;
  const ExperimentReport batch = run_experiment(c);
  const RecedingHorizonLog log = run_receding_horizon(c.system, c, 1, c.seeds.noise);
  ASSERT_EQ(log.steps.size(), 1u);
  EXPECT_NEAR(log.steps[0].input(0), batch.synthesis.u_star(0), 1e-9);
  EXPECT_NEAR(log.steps[0].gamma_star, batch.synthesis.gamma_star, 1e-9);
  EXPECT_EQ(log.steps[0].state, batch.data.state);
}

TEST(RecedingHorizon, ClosedLoopStaysBounded) {
  ExperimentConfig c;
  c.solver.method = SynthesisMethod::MultiplierSearch;
  const RecedingHorizonLog log = run_receding_horizon(c.system, c, 30, c.seeds.noise);
  ASSERT_FALSE(log.aborted) << log.failure;
  ASSERT_EQ(log.steps.size(), 30u);
  const double start = log.initial_output.cwiseAbs().maxCoeff();
  double tail = 0.0;
  for (std::size_t k = 20; k < 30; ++k) {
    tail = std::max(tail, log.steps[k].output.cwiseAbs().maxCoeff());
  }
  EXPECT_LT(tail, 0.1 * std::max(start, 1.0));
  std::ostringstream csv;
  write_receding_horizon_csv(csv, log);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 31);
}

TEST(RecedingHorizon, IterationLimitAborts) {
  ExperimentConfig c;
  c.solver.max_iterations = 3;
  const RecedingHorizonLog log = run_receding_horizon(c.system, c, 5, 1);
  EXPECT_TRUE(log.aborted);
  EXPECT_TRUE(log.steps.empty());
  EXPECT_EQ(log.failure_status, SolverStatus::NumericalFailure);
}
