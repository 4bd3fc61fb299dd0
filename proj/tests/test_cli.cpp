#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pensiongame/cli.hpp"

namespace fs = std::filesystem;
namespace cli = pensiongame::cli;
using cli::json;

namespace {

const fs::path kExamples = PENSIONGAME_EXAMPLES_DIR;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("pensiongame_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

const char* kGameOne = R"(
game = 1
[market]
r = 0.01
b = 0.144604
sigma = 0.10748
[preferences]
alpha = 0.02
beta = 0.02
gamma = 2.0
delta = 2.0
lambda = 1.0
mu = 1.0
)";

const char* kGameTwo = R"(
game = 2
[market]
r = 0.01
b = 0.014
sigma = 0.2678
[preferences]
alpha = 0.02
beta = 0.02
gamma = 2.0
delta = 2.0
lambda = 1.0
mu = 0.1
[barriers]
l = 1.0
v = 2.0
x0 = 1.5
)";

cli::ScenarioConfig parse_toml(const TempDir& d, const std::string& text) {
  return cli::load_config(d.write("c.toml", text));
}

int run(const std::string& cmd, const fs::path& cfg, const fs::path& out, std::string* err_text = nullptr) {
  cli::RunOptions o;
  o.out_dir = out;
  std::ostringstream out_s, err_s;
  const int code = cli::run_command(cmd, cfg, o, out_s, err_s);
  if (err_text) *err_text = err_s.str();
  return code;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(Config, BundledExamplesParseAndRoundTrip) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kExamples)) {
    if (e.path().extension() != ".toml") continue;
    ++n;
    const auto c = cli::load_config(e.path());
    const json echo = cli::config_to_json(c);
    EXPECT_EQ(cli::parse_config(echo), c) << e.path();
    EXPECT_EQ(cli::config_to_json(cli::parse_config(echo)), echo) << e.path();
  }
  EXPECT_GE(n, 4);
}

TEST(Config, BundledExampleValues) {
  const auto c = cli::load_config(kExamples / "bear_game2.toml");
  EXPECT_EQ(c.game, cli::GameKind::Two);
  ASSERT_TRUE(c.barriers.has_value());
  EXPECT_EQ(*c.barriers, (pensiongame::Barriers{1.0, 2.0, 1.5}));
  EXPECT_DOUBLE_EQ(c.preferences.mu, 0.1);
  ASSERT_TRUE(c.simulation.has_value());
  EXPECT_EQ(c.simulation->measure, pensiongame::MeasureTag::WorstCaseFirm);
}

TEST(Config, GameTwoDefaultsToFineStep) {
  TempDir d;
  const auto c = parse_toml(d, std::string(kGameTwo) + "[simulation]\nn_paths = 10\n");
  EXPECT_DOUBLE_EQ(c.simulation->dt, 1.0 / 2000.0);
}

TEST(Config, Errors) {
  TempDir d;
  auto expect_error = [&](const std::string& text, const std::string& needle) {
    try {
      parse_toml(d, text);
      ADD_FAILURE() << "no error for " << needle;
    } catch (const cli::ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  std::string g1 = kGameOne;
  expect_error(std::string(g1).replace(g1.find("gamma = 2.0"), 11, "gamma = 1.0"), "gamma != 1");
  expect_error(g1 + "[barriers]\nl = 1.0\nv = 2.0\nx0 = 1.5\n", "only allowed with game 2");
  std::string g2 = kGameTwo;
  expect_error(g2.substr(0, g2.find("[barriers]")), "needs a [barriers]");
  expect_error(g1 + "[simulation]\nn_pahts = 10\n", "n_pahts");
  expect_error(std::string(g1).replace(g1.find("game = 1"), 8, "game = 3"), "game must be");
  expect_error(g1 + "[simulation]\nmeasure = \"other\"\n", "unknown measure");
  expect_error(g1 + "[simulation]\ndt = -1.0\n", "dt");
  expect_error("game = 1\n[market\n", "TOML");
  try {
    cli::load_config(d.path() / "missing.toml");
    ADD_FAILURE();
  } catch (const cli::ConfigError&) {
  }
}

TEST(Config, Json) {
  TempDir d;
  const fs::path p = d.write("c.json", R"({"game": "pareto",
    "market": {"r": 0.01, "b": [0.06, 0.08], "sigma": [[0.2, 0.0], [0.05, 0.25]]},
    "preferences": {"alpha": 0.02, "beta": 0.02, "gamma": 2, "delta": 2, "lambda": 1, "mu": 1}})");
  const auto c = cli::load_config(p);
  EXPECT_EQ(c.game, cli::GameKind::Pareto);
  EXPECT_EQ(c.market.b.size(), 2);
  EXPECT_DOUBLE_EQ(c.market.sigma(1, 0), 0.05);
}

TEST(Commands, SolveWritesSolutionAndReport) {
  TempDir d;
  const fs::path out = d.path() / "out";
  EXPECT_EQ(run("solve", d.write("c.toml", kGameOne), out), cli::kOk);
  const json s = read_json(out / "solution.json");
  EXPECT_NEAR(s["benefit_ratio"].get<double>(), 0.14570113839823965, 1e-14);
  EXPECT_TRUE(s.contains("laws"));
  const json r = read_json(out / "run_report.json");
  EXPECT_EQ(r["command"], "solve");
  EXPECT_EQ(r["exit_code"], 0);
  EXPECT_TRUE(r["feasibility"]["feasible"].get<bool>());
  EXPECT_EQ(r["outputs"].size(), 1u);
  EXPECT_TRUE(r.contains("wall_time_seconds"));
}

TEST(Commands, InfeasibleSolve) {
  TempDir d;
  std::string g2 = kGameTwo;
  g2.replace(g2.find("b = 0.014"), 9, "b = 0.144604");
  g2.replace(g2.find("sigma = 0.2678"), 14, "sigma = 0.10748");
  const fs::path out = d.path() / "out";
  EXPECT_EQ(run("solve", d.write("c.toml", g2), out), cli::kInfeasible);
  EXPECT_EQ(read_json(out / "solution.json")["error"]["code"], "EtaOutOfRange");
  EXPECT_EQ(read_json(out / "run_report.json")["feasibility"]["reason"], "EtaOutOfRange");
}

TEST(Commands, ParseErrorExitCode) {
  TempDir d;
  std::string err;
  std::string g1 = kGameOne;
  g1.replace(g1.find("gamma = 2.0"), 11, "gamma = 1.0");
  EXPECT_EQ(run("solve", d.write("c.toml", g1), d.path() / "out", &err), cli::kParse);
  EXPECT_NE(err.find("gamma != 1"), std::string::npos);
  EXPECT_EQ(run("frobnicate", d.write("c2.toml", kGameOne), d.path() / "out"), cli::kParse);
}

TEST(Commands, IoErrorExitCode) {
  TempDir d;
  const fs::path blocker = d.write("file", "x");
  EXPECT_EQ(run("solve", d.write("c.toml", kGameOne), blocker / "sub"), cli::kIo);
}

TEST(Commands, SimulateGameOne) {
  TempDir d;
  const fs::path out = d.path() / "out";
  const std::string text = std::string(kGameOne) +
                           "[simulation]\nn_paths = 10\nn_steps = 12\ndt = 0.08333333333333333\nseed = 3\n"
                           "estimate_payoff = false\n";
  EXPECT_EQ(run("simulate", d.write("c.toml", text), out), cli::kOk);
  std::ifstream in(out / "paths.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,path_id,X");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 120);
  EXPECT_FALSE(fs::exists(out / "payoff.json"));
}

TEST(Commands, SimulateGameTwoPayoff) {
  TempDir d;
  const fs::path out = d.path() / "out";
  const std::string text = std::string(kGameTwo) +
                           "[simulation]\nn_paths = 200\ndt = 0.004\nseed = 3\nwrite_paths = false\n";
  EXPECT_EQ(run("simulate", d.write("c.toml", text), out), cli::kOk);
  const json p = read_json(out / "payoff.json");
  for (const char* k : {"estimate", "std_err", "censored_count", "n", "seed", "upper_exit", "target", "settings"}) {
    EXPECT_TRUE(p.contains(k)) << k;
  }
  EXPECT_EQ(p["n"], 200);
  EXPECT_EQ(p["censored_count"], 0);
  EXPECT_FALSE(fs::exists(out / "paths.csv"));
}

TEST(Commands, SeedOverride) {
  TempDir d;
  const std::string text = std::string(kGameOne) +
                           "[simulation]\nn_paths = 4\nn_steps = 3\nseed = 3\nestimate_payoff = false\n";
  const fs::path cfg = d.write("c.toml", text);
  cli::RunOptions o;
  o.seed = 99;
  o.out_dir = d.path() / "a";
  std::ostringstream sink;
  EXPECT_EQ(cli::run_command("simulate", cfg, o, sink, sink), cli::kOk);
  EXPECT_EQ(read_json(o.out_dir / "run_report.json")["config"]["simulation"]["seed"], 99);
}

TEST(Commands, VerifyNegativeControlFails) {
  TempDir d;
  const fs::path out = d.path() / "out";
  const std::string text = std::string(kGameOne) +
                           "[verify]\nmonte_carlo = false\nmoment_paths = 2000\nperturb_a = 1.01\n";
  EXPECT_EQ(run("verify", d.write("c.toml", text), out), cli::kVerifyFailed);
  const json v = read_json(out / "verify.json");
  EXPECT_FALSE(v["pass"].get<bool>());
  bool residual_failed = false;
  for (const auto& c : v["checks"]) {
    if (c["name"] == "hjbi.residual_at_candidate") residual_failed = !c["pass"].get<bool>();
  }
  EXPECT_TRUE(residual_failed);
}

TEST(Commands, VerifyPareto) {
  TempDir d;
  std::string text = kGameOne;
  text.replace(text.find("game = 1"), 8, "game = \"pareto\"");
  EXPECT_EQ(run("verify", d.write("c.toml", text), d.path() / "out"), cli::kOk);
}

TEST(Commands, SweepNeedsTable) {
  TempDir d;
  EXPECT_EQ(run("sweep", d.write("c.toml", kGameOne), d.path() / "out"), cli::kParse);
  const std::string text = std::string(kGameOne) +
                           "[sweep]\ngames = [1]\ngame1 = [{name = \"gamma\", values = [1.5, 2.0]}]\n";
  const fs::path out = d.path() / "out2";
  EXPECT_EQ(run("sweep", d.write("c2.toml", text), out), cli::kOk);
  EXPECT_TRUE(fs::exists(out / "sweep_game1_scenario.csv"));
}
