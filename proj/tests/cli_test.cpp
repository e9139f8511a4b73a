#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dmoc/cli/config.hpp"
#include "dmoc/cli/runs.hpp"
#include "dmoc/errors.hpp"

using namespace dmoc;
using namespace dmoc::cli;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("dmoc_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }

  // Exit status of the binary; stdout and stderr go to dir/out.txt.
  int run(const std::string& args) {
    const std::string cmd = std::string(DMOC_CLI_PATH) + " " + args + " > " + (dir / "out.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string output() const { return slurp(dir / "out.txt"); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static Json report(const fs::path& out) { return Json::parse(slurp(out / "report.json")); }
};

}  // namespace

TEST_F(Cli, SolveOrbitalWritesFiles) {
  const std::string cfg = write("a.json", R"({"problem": "orbital", "method": "dmoc", "N": 32})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("solve " + cfg + " -o " + out.string()), 0) << output();
  for (const char* f : {"report.json", "trajectory.csv", "iterations.log"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  const Json r = report(out);
  EXPECT_EQ(r.at("result").at("status"), "converged");
  EXPECT_EQ(r.at("result").at("counts").at("variables"), 2 * 33 + 32);
  EXPECT_LE(r.at("result").at("kkt").at("feasibility").get<double>(), 1e-10);
  EXPECT_LE(std::fabs(r.at("noether").at("total").get<double>()), 1e-9 * r.at("noether").at("scale").get<double>());
  // Resolved config carries defaults.
  EXPECT_EQ(r.at("config").at("solver").at("nonmonotone_window"), 10);
  EXPECT_EQ(r.at("config").at("params").at("r0"), 1.0);

  const std::string csv = slurp(out / "trajectory.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "t,q_r,q_phi,u_u,p_r,p_phi");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) rows += !l.empty();
  EXPECT_EQ(rows, 33);
}

TEST_F(Cli, UnknownMethodIsConfigError) {
  const std::string cfg = write("a.json", R"({"problem": "orbital", "method": "rk4", "N": 8})");
  EXPECT_EQ(run("solve " + cfg + " -o " + (dir / "o").string()), 2);
  const std::string text = output();
  EXPECT_NE(text.find("dmoc, ham-midpoint, vel-midpoint"), std::string::npos) << text;
}

TEST_F(Cli, ConfigErrors) {
  for (const char* bad : {R"({"problem": "kepler"})", R"({"N": 1})", R"({"deterministic": false})",
                          R"({"params": {"r0": 2, "literal_radii": true}})", R"({"solver": {"tolerance": 1}})",
                          R"({"problem": "orbital", "N": 8)"}) {
    const std::string cfg = write("bad.json", bad);
    EXPECT_EQ(run("solve " + cfg + " -o " + (dir / "o").string()), 2) << bad;
  }
}

TEST_F(Cli, SolverFailureExitsOne) {
  const std::string cfg = write("a.json", R"({"problem": "orbital", "N": 16, "solver": {"max_iterations": 2}})");
  const fs::path out = dir / "out";
  EXPECT_EQ(run("solve " + cfg + " -o " + out.string()), 1);
  EXPECT_EQ(report(out).at("result").at("status"), "max-iter");
}

TEST_F(Cli, EqualRadiiObjectiveIsZero) {
  const std::string cfg = write("a.json", R"({"problem": "orbital", "N": 16, "params": {"r0": 2, "rT": 2, "d": 1}})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("solve " + cfg + " -o " + out.string()), 0) << output();
  EXPECT_LE(std::fabs(report(out).at("result").at("objective").get<double>()), 1e-10);
}

TEST_F(Cli, RerunIsIdenticalApartFromTimestamp) {
  const std::string cfg = write("a.json", R"({"problem": "two-link", "method": "ham-midpoint", "N": 12})");
  ASSERT_EQ(run("solve " + cfg + " -o " + (dir / "r1").string()), 0);
  ASSERT_EQ(run("solve " + cfg + " -o " + (dir / "r2").string()), 0);
  EXPECT_EQ(slurp(dir / "r1" / "trajectory.csv"), slurp(dir / "r2" / "trajectory.csv"));
  EXPECT_EQ(slurp(dir / "r1" / "iterations.log"), slurp(dir / "r2" / "iterations.log"));
  Json a = report(dir / "r1"), b = report(dir / "r2");
  a.erase("metadata");
  b.erase("metadata");
  // Output directories differ by construction.
  a["config"].erase("output_dir");
  b["config"].erase("output_dir");
  EXPECT_EQ(a, b);
}

TEST_F(Cli, ResolvedConfigRoundTrips) {
  const std::string cfg = write("a.json", R"({"problem": "orbital", "N": 8, "params": {"literal_radii": true}})");
  const fs::path out = dir / "out";
  run("solve " + cfg + " -o " + out.string());
  const Json resolved = report(out).at("config");
  EXPECT_EQ(resolved.at("params").at("r0"), 30.0);
  EXPECT_EQ(resolved.at("params").at("rT"), 330.0);
  EXPECT_FALSE(resolved.at("params").contains("literal_radii"));
  EXPECT_EQ(to_json(parse_config(resolved)), resolved);
}

TEST_F(Cli, CompareSelfGivesZeroGaps) {
  const std::string cfg = write("a.json", R"({"problem": "two-link", "N": 10})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("compare " + cfg + " " + cfg + " -o " + out.string()), 0) << output();
  const Json g = report(out).at("gaps");
  for (const char* k : {"state", "configuration", "velocity", "control", "objective"}) EXPECT_EQ(g.at(k), 0.0) << k;
  EXPECT_TRUE(fs::exists(out / "trajectory_b.csv"));
}

TEST_F(Cli, CompareOrbitalDmocAndHamiltonian) {
  const std::string a = write("a.json", R"({"problem": "orbital", "N": 32})");
  const std::string b = write("b.json", R"({"problem": "orbital", "N": 32, "method": "ham-midpoint"})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("compare " + a + " " + b + " -o " + out.string()), 0) << output();
  const Json r = report(out);
  EXPECT_LE(r.at("gaps").at("state").get<double>(), 1e-6);
  EXPECT_NEAR(r.at("ratios").at("variables").get<double>(), 98.0 / 164.0, 1e-15);
}

TEST_F(Cli, CompareTwoLinkVariableRatio) {
  const std::string a = write("a.json", R"({"problem": "two-link", "N": 32})");
  const std::string b = write("b.json", R"({"problem": "two-link", "N": 32, "method": "ham-midpoint"})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("compare " + a + " " + b + " -o " + out.string()), 0) << output();
  EXPECT_NEAR(report(out).at("ratios").at("variables").get<double>(), 130.0 / 196.0, 1e-15);
}

TEST_F(Cli, CompareMismatchedConfigs) {
  const std::string a = write("a.json", R"({"problem": "orbital", "N": 16})");
  const std::string b = write("b.json", R"({"problem": "orbital", "N": 32})");
  EXPECT_EQ(run("compare " + a + " " + b + " -o " + (dir / "o").string()), 2);
}

TEST_F(Cli, ConvergeFreeParticleIsExact) {
  const std::string cfg = write("a.json", R"({"problem": "free-particle", "converge": {"grids": [4, 8, 16, 32]}})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("converge " + cfg + " -o " + out.string()), 0) << output();
  const Json r = report(out);
  EXPECT_TRUE(r.at("slopes").at("q_exact").get<bool>());
  EXPECT_TRUE(r.at("slopes").at("u_exact").get<bool>());
  EXPECT_EQ(r.at("reference").at("N"), 32);
  EXPECT_EQ(r.at("grids").size(), 3u);
}

TEST_F(Cli, ConvergeRejectsNonGeometricGrids) {
  const std::string cfg = write("a.json", R"({"problem": "free-particle", "converge": {"grids": [4, 6, 16]}})");
  EXPECT_EQ(run("converge " + cfg + " -o " + (dir / "o").string()), 2);
}

TEST_F(Cli, AuditOrbitalMethods) {
  const fs::path o1 = dir / "d", o2 = dir / "v";
  const std::string a = write("a.json", R"({"problem": "orbital", "N": 64})");
  const std::string b = write("b.json", R"({"problem": "orbital", "N": 64, "method": "vel-midpoint"})");
  ASSERT_EQ(run("audit " + a + " -o " + o1.string()), 0) << output();
  ASSERT_EQ(run("audit " + b + " -o " + o2.string()), 0) << output();
  const Json d = report(o1).at("noether"), v = report(o2).at("noether");
  const double scale = d.at("scale").get<double>();
  EXPECT_LE(std::fabs(d.at("total").get<double>()), 1e-9 * scale);
  EXPECT_GE(std::fabs(v.at("total").get<double>()), 100 * 1e-9 * scale);
  EXPECT_EQ(report(o1).at("noether").at("steps").size(), 64u);
}

TEST_F(Cli, AuditPendulumRollout) {
  const std::string cfg =
      write("a.json", R"({"problem": "pendulum", "audit": {"rollout": {"h": 0.1, "steps": 200, "q0": [1], "qdot0": [0]}}})");
  const fs::path out = dir / "out";
  ASSERT_EQ(run("audit " + cfg + " -o " + out.string()), 0) << output();
  const Json r = report(out);
  EXPECT_EQ(r.at("mode"), "rollout");
  EXPECT_LE(r.at("energy").at("max_deviation").get<double>(), 0.05 * (1 - std::cos(1.0)));
  EXPECT_EQ(r.at("momentum").at("max_deviation").get<double>(), 0.0);
}

TEST_F(Cli, AuditMissingGenerator) {
  const std::string cfg = write("a.json", R"({"problem": "orbital", "N": 8, "audit": {"generator": 3}})");
  EXPECT_EQ(run("audit " + cfg + " -o " + (dir / "o").string()), 2);
}

TEST(Config, DefaultsAndValidation) {
  const RunConfig c = parse_config(Json::object());
  EXPECT_EQ(c.problem, "orbital");
  EXPECT_EQ(c.method, "dmoc");
  EXPECT_EQ(c.N, 32);
  EXPECT_TRUE(c.deterministic);
  EXPECT_EQ(c.converge.grids, (std::vector<int>{8, 16, 32, 64, 128, 512}));
  EXPECT_THROW(parse_config(Json{{"method", "shooting"}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"N", "many"}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"extra", 1}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"problem", "two-link"}, {"params", {{"r0", 2}}}}), ConfigError);
}

TEST(Config, BuildProblemUsesParams) {
  const RunConfig c = parse_config(Json{{"problem", "two-link"}, {"params", {{"g", 0.0}}}});
  const Ocp ocp = build_problem(c, 10);
  EXPECT_EQ(ocp.N, 10);
  EXPECT_EQ(c.params.at("g"), 0.0);
  EXPECT_EQ(c.params.at("m1"), 1.0);
}
