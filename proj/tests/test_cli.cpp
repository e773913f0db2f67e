#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ddrobust_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DDROBUST_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, RunWritesArtifacts) {
  const fs::path dir = scratch("run");
  ASSERT_EQ(run_cli("--out " + dir.string() + " run"), 0);
  for (const char* name : {"report.json", "historical.csv", "recent.csv", "outputs.csv",
                           "costs.csv", "outputs.svg", "costs.svg"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  EXPECT_NE(slurp(dir / "report.json").find("\"optimal\""), std::string::npos);
}

TEST(Cli, RunIsReproducible) {
  const fs::path a = scratch("repro_a");
  const fs::path b = scratch("repro_b");
  ASSERT_EQ(run_cli("--out " + a.string() + " run --no-svg"), 0);
  ASSERT_EQ(run_cli("--out " + b.string() + " run --no-svg"), 0);
  EXPECT_FALSE(fs::exists(a / "outputs.svg"));
  for (const char* name : {"historical.csv", "recent.csv", "outputs.csv", "costs.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(Cli, StepwisePipeline) {
  const fs::path dir = scratch("steps");
  const std::string out = "--out " + dir.string();
  ASSERT_EQ(run_cli(out + " generate"), 0);
  EXPECT_TRUE(fs::exists(dir / "recent_true.csv"));
  ASSERT_EQ(run_cli(out + " synthesize --export-predictor"), 0);
  EXPECT_TRUE(fs::exists(dir / "result.json"));
  EXPECT_TRUE(fs::exists(dir / "predictor.json"));
  ASSERT_EQ(run_cli(out + " validate --samples 7"), 0);
  const std::string costs = slurp(dir / "costs.csv");
  EXPECT_EQ(std::count(costs.begin(), costs.end(), '\n'), 8);
}

TEST(Cli, SeedOverrideChangesData) {
  const fs::path a = scratch("seed_a");
  const fs::path b = scratch("seed_b");
  ASSERT_EQ(run_cli("--out " + a.string() + " generate"), 0);
  ASSERT_EQ(run_cli("--seed data=8 --out " + b.string() + " generate"), 0);
  EXPECT_NE(slurp(a / "historical.csv"), slurp(b / "historical.csv"));
  EXPECT_EQ(slurp(a / "recent.csv").substr(0, 12), slurp(b / "recent.csv").substr(0, 12));
}

TEST(Cli, InfeasibleExitsWithTwo) {
  const fs::path dir = scratch("infeasible");
  const std::string out = " --out " + dir.string();
  ASSERT_EQ(run_cli(out + " generate"), 0);
  // Measured windows are always consistent with the data, so shift one
  // output sample well beyond the noise bound.
  std::istringstream in(slurp(dir / "recent.csv"));
  std::ostringstream edited;
  std::string line;
  for (int row = 0; std::getline(in, line); ++row) {
    if (row == 2) {
      const auto comma = line.rfind(',');
      line = line.substr(0, comma + 1) + std::to_string(std::stod(line.substr(comma + 1)) + 1.0);
    }
    edited << line << '\n';
  }
  std::ofstream(dir / "shifted.csv") << edited.str();
  EXPECT_EQ(run_cli(out + " synthesize --recent " + (dir / "shifted.csv").string()), 2);
}

TEST(Cli, SolverFailureExitsWithThree) {
  const fs::path dir = scratch("solver");
  const fs::path cfg =
      write_config(dir, "cfg.json", R"({"solver": {"max_iterations": 1}, "n_samples": 0})");
  EXPECT_EQ(run_cli("--config " + cfg.string() + " --out " + dir.string() + " run"), 3);
}

TEST(Cli, UsageErrorsExitWithOne) {
  const fs::path dir = scratch("usage");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(run_cli("--seed bogus=1" + out + " run"), 1);
  EXPECT_EQ(run_cli("--seed data=x" + out + " run"), 1);
  EXPECT_EQ(run_cli("--config " + (dir / "missing.json").string() + out + " run"), 1);
  const fs::path bad = write_config(dir, "bad.json", R"({"unknown_key": 1})");
  EXPECT_EQ(run_cli("--config " + bad.string() + out + " run"), 1);
}

TEST(Cli, RecedingHorizon) {
  const fs::path dir = scratch("rhc");
  const fs::path cfg = write_config(dir, "cfg.json", R"({"solver": {"method": "multiplier"}})");
  ASSERT_EQ(run_cli("--config " + cfg.string() + " --out " + dir.string() + " rhc --steps 4"), 0);
  const std::string csv = slurp(dir / "rhc.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(dir / "rhc.json"));
}
