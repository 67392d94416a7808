#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qctrans/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qct::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qctrans_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateClassicalPresetWritesCsvAndSvg) {
  const auto r = cli({"simulate", "--preset", "fig1_classical", "--out", dir_.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "fig1_classical.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "fig1_classical.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "fig1_classical_scenario.json"));
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("50 trajectories"), std::string::npos);
}

TEST_F(CliTest, ValidateBrokenConfigNamesTheField) {
  const auto path = write("bad.json", R"({"system": {"type": "double_slit"}, "coupling": {"type": "gaussian_cdf", "mu": 0, "sigma": -1}})");
  const auto r = cli({"validate", "--config", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("coupling.sigma"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, ValidateGoodConfig) {
  const auto path = write("ok.json", R"({"name": "demo", "system": {"type": "oscillator_2d"}, "mode": "guidance"})");
  const auto r = cli({"validate", "--config", path});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("demo: ok (guidance P=1"), std::string::npos);
}

TEST_F(CliTest, SyntaxErrorExitsOne) {
  const auto path = write("syntax.json", "{\n\"system\": }\n");
  const auto r = cli({"validate", "--config", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, MissingConfigFileIsRuntimeFailure) {
  const auto r = cli({"validate", "--config", (dir_ / "nope.json").string()});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"bogus"}).code, 1);
  EXPECT_EQ(cli({"simulate"}).code, 1);
  EXPECT_EQ(cli({"simulate", "--preset", "fig2"}).code, 1);
  EXPECT_EQ(cli({"field", "--preset", "fig5", "--grid", "1"}).code, 1);
  EXPECT_EQ(cli({"simulate", "--preset", "fig5", "--n", "9"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, PresetList) {
  const auto r = cli({"preset-list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("fig1_quantum\tb=15 t0=2 | 0<=t<=2 | rho0=0.625 u=-2 X=2.5 | n=50\n"), std::string::npos);
  EXPECT_NE(r.out.find("fig8\t"), std::string::npos);
  EXPECT_TRUE(r.err.empty());
}

TEST_F(CliTest, FieldToStandardOutput) {
  const auto r = cli({"field", "--preset", "fig5", "--grid", "101"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x,y,Q");
  std::size_t rows = 0;
  for (std::string l; std::getline(in, l);) ++rows;
  EXPECT_EQ(rows, 101u * 101u);
  EXPECT_NE(r.out.find("\n0,0,nan\n"), std::string::npos);
}

TEST_F(CliTest, FieldFilesForPresetWithoutFields) {
  const auto r = cli({"field", "--preset", "fig3_quantum", "--grid", "11", "--quantity", "rho", "--out", dir_.string(),
                      "--format", "csv,svg"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "fig3_quantum_rho.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "fig3_quantum_rho.svg"));
}

TEST_F(CliTest, SampleEmitsInitialConditions) {
  const auto r = cli({"sample", "--preset", "fig1_quantum", "--n", "5"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "trajectory_id,x,vx");
  std::size_t rows = 0;
  for (std::string l; std::getline(in, l);) ++rows;
  EXPECT_EQ(rows, 5u);

  const auto f = cli({"sample", "--preset", "fig5", "--out", (dir_ / "s.csv").string()});
  EXPECT_EQ(f.code, 0) << f.err;
  EXPECT_TRUE(fs::exists(dir_ / "s.csv"));
  EXPECT_TRUE(f.out.empty());
}

TEST_F(CliTest, SimulateGroupAndOverrides) {
  const auto path = write("osc.json", R"({"name": "osc", "system": {"type": "oscillator_2d"}, "mode": "guidance",
      "time": {"end": 1, "n_outputs": 11}, "output": {"formats": ["json"]}})");
  const auto r = cli({"simulate", "--config", path, "--out", dir_.string(), "--n", "3", "--seed", "9"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "osc.json");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto res = qct::ensemble_from_json_text(ss.str());
  EXPECT_EQ(res.trajectories.size(), 3u);
  EXPECT_FALSE(fs::exists(dir_ / "osc.csv"));
}
