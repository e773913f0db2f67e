#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ddrobust/behavioral.hpp"
#include "ddrobust/noise.hpp"
#include "ddrobust/plant.hpp"
#include "ddrobust/predictor.hpp"
#include "ddrobust/synthesis.hpp"

namespace ddrobust {

struct SeedSet {
  std::uint64_t data = 7;        // historical trajectory (x0, then inputs)
  std::uint64_t recent = 11;     // recent inputs
  std::uint64_t noise = 13;      // noise injected into y_ini
  std::uint64_t validation = 17; // Monte-Carlo noise samples

  /// Overrides one seed by name; throws InvalidArgument for unknown names.
  void set(const std::string& name, std::uint64_t value);
};

struct SolverConfig {
  SynthesisMethod method = SynthesisMethod::Conic;
  ConicSolver backend = ConicSolver::Clarabel;
  double tolerance = 1e-8;
  Index max_iterations = 200000;
};

/// Defaults reproduce the example setup: third-order plant, T_d = 100,
/// T_ini = 4, T_e = 20, energy bound 1e-3 per sample, zero reference, Q = R = 1.
struct ExperimentConfig {
  LtiSystem system = reference_plant();
  std::string system_source = "builtin";
  Index data_length = 100;
  Index past = 4;
  Index future = 20;
  double epsilon = 1e-3;
  Matrix q_weight = Matrix::Identity(1, 1);
  Matrix r_weight = Matrix::Identity(1, 1);
  std::optional<Vector> reference;  // nullopt: zero
  Index samples = 100;
  double input_amplitude = 1.0;
  bool inject_noise = true;
  SeedSet seeds;
  SolverConfig solver;

  Horizons horizons() const { return {past, future}; }
  Vector reference_vector() const;
  NoiseModel noise_model() const;
  TrackingProblem tracking_problem() const;
  SynthesisOptions synthesis_options() const;
  /// Throws InvalidArgument or Dimension on inconsistent fields.
  void validate() const;
};

/// Historical data plus a measured recent window.
struct GeneratedData {
  GeneratedTrajectory historical;
  TrajectoryData recent_true;  // T_ini samples from the end of the historical run
  TrajectoryData recent;       // y corrupted by the injected noise
  Vector injected_noise;       // p*T_ini, recent.y = recent_true.y + w
  Vector state;                // plant state right after the recent window
};

GeneratedData generate_data(const ExperimentConfig& config);

/// Uniform sample from the feasible noise set of the exact window y_true.
/// The measured window is then y_true + w.
Vector draw_injected_noise(const HankelPartition& part, const Vector& u_ini,
                           const Vector& y_true, const NoiseModel& noise,
                           std::mt19937_64& rng);

struct ProblemSetup {
  HankelPartition partition;
  Vector u_ini;
  Vector y_ini;
  NoiseModel noise;
  NoiseParameterization param;
  OutputPredictor predictor;
  TrackingProblem problem;
};

ProblemSetup setup_problem(const ExperimentConfig& config, const TrajectoryData& historical,
                           const TrajectoryData& recent);

struct Validation {
  std::vector<double> costs;
  std::vector<Vector> outputs;  // predicted y (p*T_e) per realization
  WorstCase worst_case;
  double max_cost = 0.0;
};

Validation validate_controller(const ProblemSetup& setup, const Vector& u_star, Index samples,
                               std::uint64_t seed);

struct ExperimentReport {
  ExperimentConfig config;
  GeneratedData data;
  std::vector<Index> selected_rows;
  double gram_condition = 0.0;
  Index noise_dimension = 0;
  Index reduced_noise_dimension = 0;
  NoiseSetShape noise_shape = NoiseSetShape::Ellipsoid;
  SynthesisResult synthesis;
  std::optional<Validation> validation;  // only when synthesis is optimal
  Matrix plant_output;                    // true plant response to u*, p x T_e
  double plant_cost = std::numeric_limits<double>::quiet_NaN();
  double total_time = 0.0;
};

/// Full pipeline. Stage errors are rethrown with the stage name prefixed;
/// a non-optimal synthesis is returned in the report, not thrown.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace ddrobust
