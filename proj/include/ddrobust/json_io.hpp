#pragma once

#include <filesystem>

#include <json.hpp>

#include "ddrobust/experiment.hpp"
#include "ddrobust/receding_horizon.hpp"

namespace ddrobust {

using Json = nlohmann::json;

/// Matrices are row-major nested arrays; a bare number is a 1 x 1 matrix.
Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j, const char* what);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);
/// NaN and infinities become null.
Json number_to_json(double value);

/// Keys A, B, C and optionally D (zero when absent).
LtiSystem system_from_json(const Json& j);
Json system_to_json(const LtiSystem& sys);
LtiSystem load_system(const std::filesystem::path& path);

/// Keys phi11, phi12, phi22.
NoiseModel noise_from_json(const Json& j);

/// Unknown keys are rejected. A string "system" is a path resolved against
/// `base_dir`.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& config);

Json result_to_json(const SynthesisResult& result);
SynthesisResult result_from_json(const Json& j);

Json predictor_to_json(const OutputPredictor& pred);
Json report_to_json(const ExperimentReport& report);
Json receding_horizon_to_json(const RecedingHorizonLog& log);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace ddrobust
