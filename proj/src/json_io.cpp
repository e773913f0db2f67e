#include "ddrobust/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "ddrobust/error.hpp"

namespace ddrobust {

namespace {

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorKind::InvalidArgument, message);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

Index integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<Index>();
}

std::uint64_t seed_value(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) bad(std::string(what) + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

const char* method_name(SynthesisMethod method) {
  return method == SynthesisMethod::Conic ? "conic" : "multiplier";
}

SynthesisMethod method_from_name(const std::string& name) {
  if (name == "conic") return SynthesisMethod::Conic;
  if (name == "multiplier") return SynthesisMethod::MultiplierSearch;
  bad("solver.method must be \"conic\" or \"multiplier\"");
}

ConicSolver backend_from_name(const std::string& name) {
  if (name == "clarabel") return ConicSolver::Clarabel;
  if (name == "scs") return ConicSolver::Scs;
  bad("solver.backend must be \"clarabel\" or \"scs\"");
}

const char* shape_name(NoiseSetShape shape) {
  switch (shape) {
    case NoiseSetShape::Empty: return "empty";
    case NoiseSetShape::Point: return "point";
    case NoiseSetShape::Ellipsoid: return "ellipsoid";
  }
  return "unknown";
}

SolverStatus status_from_name(const std::string& name) {
  for (SolverStatus s : {SolverStatus::Optimal, SolverStatus::Infeasible, SolverStatus::Unbounded,
                         SolverStatus::NumericalFailure}) {
    if (to_string(s) == name) return s;
  }
  bad("unknown solver status '" + name + "'");
}

template <class T>
Json index_list(const std::vector<T>& v) {
  Json out = Json::array();
  for (T x : v) out.push_back(x);
  return out;
}

}  // namespace

Json number_to_json(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(number_to_json(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) bad(std::string(what) + " must be a nested array");
  const Index rows = static_cast<Index>(j.size());
  if (!j.front().is_array()) bad(std::string(what) + " must be a nested array of rows");
  const Index cols = static_cast<Index>(j.front().size());
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      bad(std::string(what) + " has ragged rows");
    }
    for (Index k = 0; k < cols; ++k) a(i, k) = number(row[static_cast<std::size_t>(k)], what);
  }
  return a;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number_to_json(v(i)));
  return out;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = number(j[static_cast<std::size_t>(i)], what);
  return v;
}

LtiSystem system_from_json(const Json& j) {
  if (!j.is_object()) bad("system must be an object with keys A, B, C, D");
  for (const char* key : {"A", "B", "C"}) {
    if (!j.contains(key)) bad(std::string("system is missing key ") + key);
  }
  Matrix d;
  if (j.contains("D")) d = matrix_from_json(j["D"], "D");
  return LtiSystem(matrix_from_json(j["A"], "A"), matrix_from_json(j["B"], "B"),
                   matrix_from_json(j["C"], "C"), d);
}

Json system_to_json(const LtiSystem& sys) {
  return {{"A", matrix_to_json(sys.a())},
          {"B", matrix_to_json(sys.b())},
          {"C", matrix_to_json(sys.c())},
          {"D", matrix_to_json(sys.d())}};
}

LtiSystem load_system(const std::filesystem::path& path) {
  try {
    return system_from_json(read_json(path));
  } catch (const Error& e) {
    throw e.within(path.string());
  }
}

NoiseModel noise_from_json(const Json& j) {
  if (!j.is_object()) bad("noise model must be an object with keys phi11, phi12, phi22");
  for (const char* key : {"phi11", "phi12", "phi22"}) {
    if (!j.contains(key)) bad(std::string("noise model is missing key ") + key);
  }
  const Json& p12 = j["phi12"];
  Vector phi12;
  if (p12.is_array() && !p12.empty() && p12.front().is_array()) {
    const Matrix row = matrix_from_json(p12, "phi12");
    if (row.rows() != 1) bad("phi12 must be a single row");
    phi12 = row.row(0).transpose();
  } else {
    phi12 = vector_from_json(p12, "phi12");
  }
  return NoiseModel(number(j["phi11"], "phi11"), phi12, matrix_from_json(j["phi22"], "phi22"));
}

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known = {
      "system", "T_d",     "T_ini",           "T_e",          "epsilon", "q_weight", "r_weight",
      "reference", "n_samples", "input_amplitude", "inject_noise", "seeds",   "solver",   "system_source"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) bad("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  if (j.contains("system")) {
    const Json& s = j["system"];
    if (s.is_string()) {
      std::filesystem::path path = s.get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      c.system = load_system(path);
      c.system_source = path.string();
    } else {
      c.system = system_from_json(s);
      c.system_source = "inline";
    }
  }
  // Informational label written by config_to_json.
  if (j.contains("system_source") && !(j.contains("system") && j["system"].is_string())) {
    if (!j["system_source"].is_string()) bad("system_source must be a string");
    c.system_source = j["system_source"].get<std::string>();
  }
  if (j.contains("T_d")) c.data_length = integer(j["T_d"], "T_d");
  if (j.contains("T_ini")) c.past = integer(j["T_ini"], "T_ini");
  if (j.contains("T_e")) c.future = integer(j["T_e"], "T_e");
  if (j.contains("epsilon")) c.epsilon = number(j["epsilon"], "epsilon");
  const Index m = c.system.inputs();
  const Index p = c.system.outputs();
  c.q_weight = Matrix::Identity(p, p);
  c.r_weight = Matrix::Identity(m, m);
  if (j.contains("q_weight")) c.q_weight = matrix_from_json(j["q_weight"], "q_weight");
  if (j.contains("r_weight")) c.r_weight = matrix_from_json(j["r_weight"], "r_weight");
  if (j.contains("reference")) {
    const Json& r = j["reference"];
    if (r.is_string()) {
      if (r.get<std::string>() != "zero") bad("reference must be \"zero\" or an array");
    } else {
      c.reference = vector_from_json(r, "reference");
    }
  }
  if (j.contains("n_samples")) c.samples = integer(j["n_samples"], "n_samples");
  if (j.contains("input_amplitude")) {
    c.input_amplitude = number(j["input_amplitude"], "input_amplitude");
  }
  if (j.contains("inject_noise")) {
    if (!j["inject_noise"].is_boolean()) bad("inject_noise must be true or false");
    c.inject_noise = j["inject_noise"].get<bool>();
  }
  if (j.contains("seeds")) {
    const Json& s = j["seeds"];
    if (!s.is_object()) bad("seeds must be an object");
    for (const auto& [name, value] : s.items()) c.seeds.set(name, seed_value(value, "seed"));
  }
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    if (!s.is_object()) bad("solver must be an object");
    for (const auto& [key, value] : s.items()) {
      if (key == "method") {
        if (!value.is_string()) bad("solver.method must be a string");
        c.solver.method = method_from_name(value.get<std::string>());
      } else if (key == "backend") {
        if (!value.is_string()) bad("solver.backend must be a string");
        c.solver.backend = backend_from_name(value.get<std::string>());
      } else if (key == "tolerance") {
        c.solver.tolerance = number(value, "solver.tolerance");
      } else if (key == "max_iterations") {
        c.solver.max_iterations = integer(value, "solver.max_iterations");
      } else {
        bad("unknown solver key '" + key + "'");
      }
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_json(path), path.parent_path());
  } catch (const Error& e) {
    throw e.within(path.string());
  }
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["system"] = system_to_json(c.system);
  j["system_source"] = c.system_source;
  j["T_d"] = c.data_length;
  j["T_ini"] = c.past;
  j["T_e"] = c.future;
  j["epsilon"] = c.epsilon;
  j["q_weight"] = matrix_to_json(c.q_weight);
  j["r_weight"] = matrix_to_json(c.r_weight);
  j["reference"] = c.reference ? vector_to_json(*c.reference) : Json("zero");
  j["n_samples"] = c.samples;
  j["input_amplitude"] = c.input_amplitude;
  j["inject_noise"] = c.inject_noise;
  j["seeds"] = {{"data", c.seeds.data},
                {"recent", c.seeds.recent},
                {"noise", c.seeds.noise},
                {"validation", c.seeds.validation}};
  j["solver"] = {{"method", method_name(c.solver.method)},
                 {"backend", c.solver.backend == ConicSolver::Scs ? "scs" : "clarabel"},
                 {"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations}};
  return j;
}

Json result_to_json(const SynthesisResult& r) {
  return {{"u_star", vector_to_json(r.u_star)},
          {"gamma_star", number_to_json(r.gamma_star)},
          {"alpha_star", number_to_json(r.alpha_star)},
          {"status", to_string(r.status)},
          {"method", r.method},
          {"iterations", r.iterations},
          {"lmi_min_eigenvalue", number_to_json(r.lmi_min_eigenvalue)},
          {"detail", r.detail},
          {"timings", {{"solve_seconds", r.solve_time}}}};
}

SynthesisResult result_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("u_star") || !j.contains("gamma_star") ||
      !j.contains("status")) {
    bad("result must contain u_star, gamma_star and status");
  }
  auto optional_number = [](const Json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  SynthesisResult r;
  r.u_star = vector_from_json(j["u_star"], "u_star");
  r.gamma_star = optional_number(j["gamma_star"]);
  if (j.contains("alpha_star")) r.alpha_star = optional_number(j["alpha_star"]);
  r.status = status_from_name(j["status"].get<std::string>());
  if (j.contains("method")) r.method = j["method"].get<std::string>();
  return r;
}

Json predictor_to_json(const OutputPredictor& pred) {
  return {{"selected_rows", index_list(pred.selected_rows)},
          {"gram_condition", number_to_json(pred.gram_condition)},
          {"lambda", matrix_to_json(pred.lambda)},
          {"B_ini", matrix_to_json(pred.b_ini)},
          {"B_u", matrix_to_json(pred.b_u)},
          {"B_w", matrix_to_json(pred.b_w)},
          {"y0", vector_to_json(pred.y0)}};
}

Json report_to_json(const ExperimentReport& report) {
  Json j;
  j["config"] = config_to_json(report.config);
  j["synthesis"] = result_to_json(report.synthesis);
  j["noise"] = {{"injected", vector_to_json(report.data.injected_noise)},
                {"free_dimension", report.noise_dimension},
                {"reduced_dimension", report.reduced_noise_dimension},
                {"shape", shape_name(report.noise_shape)}};
  j["predictor"] = {{"selected_rows", index_list(report.selected_rows)},
                    {"gram_condition", number_to_json(report.gram_condition)}};
  j["initial_state"] = vector_to_json(report.data.historical.initial_state);
  if (report.validation) {
    const Validation& v = *report.validation;
    j["validation"] = {{"samples", v.costs.size()},
                       {"max_realized_cost", number_to_json(v.max_cost)},
                       {"worst_case_cost", number_to_json(v.worst_case.gamma)},
                       {"worst_case_g_w", vector_to_json(v.worst_case.g_w)}};
    j["plant"] = {{"output", matrix_to_json(report.plant_output)},
                  {"cost", number_to_json(report.plant_cost)}};
  }
  j["timings"] = {{"solve_seconds", report.synthesis.solve_time},
                  {"total_seconds", report.total_time}};
  return j;
}

Json receding_horizon_to_json(const RecedingHorizonLog& log) {
  Json steps = Json::array();
  for (const RecedingHorizonStep& s : log.steps) {
    steps.push_back({{"step", s.step},
                     {"state", vector_to_json(s.state)},
                     {"input", vector_to_json(s.input)},
                     {"output", vector_to_json(s.output)},
                     {"gamma_star", number_to_json(s.gamma_star)},
                     {"alpha_star", number_to_json(s.alpha_star)}});
  }
  Json j = {{"steps", std::move(steps)}, {"aborted", log.aborted}};
  if (log.aborted) {
    j["failure"] = log.failure;
    j["failure_status"] = to_string(log.failure_status);
  }
  return j;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace ddrobust
