#pragma once

#include <string>
#include <vector>

#include "ddrobust/experiment.hpp"

namespace ddrobust {

struct RecedingHorizonStep {
  Index step = 0;
  Vector state;   // x_k before the input is applied
  Vector input;   // first block of u*
  Vector output;  // true y_k
  double gamma_star = 0.0;
  double alpha_star = 0.0;
};

struct RecedingHorizonLog {
  std::vector<RecedingHorizonStep> steps;
  bool aborted = false;
  SolverStatus failure_status = SolverStatus::Optimal;
  std::string failure;
  Vector initial_state;
  Matrix initial_output;  // true outputs of the first recent window, p x T_ini
};

/// Closed loop on `plant`: the controller only sees the historical data and
/// the last T_ini (possibly noisy) measurements. A solver failure ends the
/// loop and is recorded in the log.
RecedingHorizonLog run_receding_horizon(const LtiSystem& plant, const ExperimentConfig& config,
                                        Index steps, std::uint64_t seed);

}  // namespace ddrobust
