#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

using namespace sea;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(SEA_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

TEST(Config, ParsesAllInitialForms) {
  auto cfg = cli::parse_run_config(json::parse(R"({"spectrum":[0,1],"initial":[0.5,0.5]})"));
  EXPECT_TRUE(std::holds_alternative<std::vector<double>>(cfg.initial));
  cfg = cli::parse_run_config(json::parse(R"({"spectrum":[0,1],"initial":{"canonical":0.5}})"));
  EXPECT_EQ(std::get<cli::CanonicalInit>(cfg.initial).beta, 0.5);
  cfg = cli::parse_run_config(json::parse(
      R"({"spectrum":[0,1,2],"initial":{"uniform":[0,2]},"constants":{"k":2,"tau":3},
          "integrator":{"method":"rk45","t_end":4,"sample_stride":7,"step":0.5,"tolerance":1e-9}})"));
  EXPECT_EQ(std::get<cli::UniformInit>(cfg.initial).support, (Support{0, 2}));
  EXPECT_EQ(cfg.k, 2.0);
  EXPECT_EQ(cfg.tau, 3.0);
  EXPECT_EQ(cfg.integrator.method, IntegrationMethod::rk45);
  EXPECT_EQ(cfg.integrator.t_end, 4.0);
  EXPECT_EQ(cfg.integrator.sample_stride, 7u);
  EXPECT_EQ(*cfg.integrator.step, 0.5);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(cli::parse_run_config(json::parse(R"({"initial":[1]})")), cli::ConfigError);
  EXPECT_THROW(cli::parse_run_config(json::parse(R"({"spectrum":[0,1]})")), cli::ConfigError);
  EXPECT_THROW(cli::parse_run_config(json::parse(R"({"spectrum":[0,1],"initial":{"canonical":1,"uniform":[0]}})")),
               cli::ConfigError);
  EXPECT_THROW(cli::parse_run_config(json::parse(R"({"spectrum":[0,1],"initial":[1,0],"integrator":{"method":"euler"}})")),
               cli::ConfigError);
  EXPECT_THROW(cli::parse_run_config(json::parse(R"({"spectrum":"x","initial":[1,0]})")), cli::ConfigError);
  EXPECT_THROW(cli::load_run_config("/nonexistent/config.json"), cli::ConfigError);
}

TEST(Config, LenientInitialWarns) {
  const auto cfg = cli::parse_run_config(json::parse(R"({"spectrum":[0,1],"initial":[1,3]})"));
  std::ostringstream warn;
  const auto p = cli::build_initial(cfg, EnergySpectrum({0.0, 1.0}), warn);
  EXPECT_DOUBLE_EQ(p[1], 0.75);
  EXPECT_NE(warn.str().find("normalizing"), std::string::npos);
}

TEST(FormatNumber, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 2.0e-300, -7.25, 1e21}) EXPECT_EQ(std::stod(cli::format_number(x)), x);
}

TEST(Simulate, ThreeLevelScenario) {
  const auto dir = scratch("simulate");
  write(dir / "c.json", R"({"spectrum":[0,1,2],"initial":[0.5,0.2,0.3]})");
  const auto r = run_cli({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "t.csv").string(),
                          "--summary", (dir / "s.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = parse_csv(slurp(dir / "t.csv"), &header);
  EXPECT_EQ(header, "t,p_1,p_2,p_3,E,S,dSdt");
  ASSERT_EQ(rows.size(), 5001u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i][5] - rows[i - 1][5], -1e-10);

  const auto s = json::parse(slurp(dir / "s.json"));
  EXPECT_LT(s["L_inf_to_canonical"].get<double>(), 1e-6);
  EXPECT_NEAR(s["beta_of_E"].get<double>(), 0.30461826104131448179, 1e-13);

  // Summary statistics are recomputable from the rows.
  double drift = 0.0;
  double min_rate = rows[0][6];
  for (const auto& row : rows) {
    drift = std::max(drift, std::abs(row[4] - rows[0][4]));
    min_rate = std::min(min_rate, row[6]);
  }
  EXPECT_NEAR(s["max_energy_drift"].get<double>(), drift, 1e-12);
  EXPECT_NEAR(s["min_dSdt"].get<double>(), min_rate, 1e-12);
  const auto final_state = s["final_state"].get<std::vector<double>>();
  for (int j = 0; j < 3; ++j) EXPECT_EQ(final_state[j], rows.back()[1 + j]);
}

TEST(Simulate, CanonicalInitialStaysCanonical) {
  const auto dir = scratch("canonical");
  write(dir / "c.json", R"({"spectrum":[0,1,2,5],"initial":{"canonical":0.7},"integrator":{"t_end":5}})");
  const auto r = run_cli({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "t.csv").string(),
                          "--summary", (dir / "s.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = json::parse(slurp(dir / "s.json"));
  EXPECT_LT(s["L_inf_to_canonical"].get<double>(), 1e-10);
  EXPECT_LT(s["L_inf_to_canonical_initial"].get<double>(), 1e-10);
}

TEST(Simulate, FrozenZeroColumn) {
  const auto dir = scratch("frozen");
  write(dir / "c.json", R"({"spectrum":[0,1,2],"initial":[0.7,0,0.3],"integrator":{"t_end":20}})");
  const auto r = run_cli({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "t.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : parse_csv(slurp(dir / "t.csv"), nullptr)) ASSERT_EQ(row[2], 0.0);
}

TEST(Simulate, FlagsOverrideConfigAndOutputsAreDeterministic) {
  const auto dir = scratch("override");
  write(dir / "c.json", R"({"spectrum":[0,1,2],"initial":[0.5,0.2,0.3],"outputs":{"trajectory":")" +
                            (dir / "a.csv").string() + R"("}})");
  const auto base = (dir / "c.json").string();
  ASSERT_EQ(run_cli({"simulate", "--config", base, "--t-end", "2", "--stride", "10"}).code, 0);
  const std::string first = slurp(dir / "a.csv");
  ASSERT_EQ(run_cli({"simulate", "--config", base, "--t-end", "2", "--stride", "10", "--out",
                     (dir / "b.csv").string()})
                .code,
            0);
  EXPECT_EQ(first, slurp(dir / "b.csv"));
  const auto rows = parse_csv(first, nullptr);
  EXPECT_EQ(rows.size(), 21u);
  EXPECT_DOUBLE_EQ(rows.back()[0], 2.0);
}

TEST(Simulate, ErrorsAndExitCodes) {
  const auto dir = scratch("errors");
  write(dir / "bad.json", "{not json");
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "bad.json").string()}).code, 2);
  write(dir / "len.json", R"({"spectrum":[0,1,2],"initial":[0.5,0.5]})");
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "len.json").string()}).code, 2);
  write(dir / "back.json", R"({"spectrum":[0,1,2],"initial":[0.5,0.2,0.3],"integrator":{"t_end":-1}})");
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "back.json").string()}).code, 2);
  const auto ok = run_cli({"simulate", "--config", (dir / "back.json").string(), "--allow-backward"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.err.find("backward"), std::string::npos);
  write(dir / "coarse.json", R"({"spectrum":[0,1,2],"initial":[0.98,0.01,0.01]})");
  const auto abort = run_cli({"simulate", "--config", (dir / "coarse.json").string(), "--step", "5"});
  EXPECT_EQ(abort.code, 3);
  EXPECT_FALSE(abort.err.empty());
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "back.json").string(), "--method", "euler"}).code, 2);
}

TEST(Equilibrium, TwoLevel) {
  const auto r = run_cli({"equilibrium", "--levels", "0,1", "--energy", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["beta"].get<double>(), std::log(3.0), 1e-12);
  EXPECT_NEAR(j["distribution"][0].get<double>(), 0.75, 1e-15);
  EXPECT_NEAR(j["Z"].get<double>(), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(j["log_Z"].get<double>(), std::log(4.0 / 3.0), 1e-15);
  // Keys are emitted in lexicographic order.
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}

TEST(Equilibrium, MeanIsUniform) {
  const auto r = run_cli({"equilibrium", "--levels", "0,1,2", "--energy", "1"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["beta"].get<double>(), 0.0);
  EXPECT_TRUE(j["temperature"].is_null());
  EXPECT_TRUE(j["temperature_infinite"].get<bool>());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(j["distribution"][i].get<double>(), 1.0 / 3.0, 1e-15);
}

TEST(Equilibrium, PartialSupportAndErrors) {
  const auto r = run_cli({"equilibrium", "--levels", "0,1,2,3", "--energy", "1.4", "--support", "0,2,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["beta"].get<double>(), 0.1667642199947380643, 1e-13);
  EXPECT_EQ(run_cli({"equilibrium", "--levels", "0,1", "--energy", "1.5"}).code, 2);
  EXPECT_EQ(run_cli({"equilibrium", "--levels", "0,1", "--energy", "0.5", "--support", "4"}).code, 2);
  EXPECT_EQ(run_cli({"equilibrium", "--levels", "0,x", "--energy", "0.5"}).code, 2);
  EXPECT_EQ(run_cli({"equilibrium", "--levels", "0,1"}).code, 2);
}

TEST(Diagram, TwoLevelPeakAndSvg) {
  const auto dir = scratch("diagram");
  const auto r = run_cli({"diagram", "--levels", "0,1", "--out", (dir / "d.csv").string(), "--svg",
                          (dir / "d.svg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = parse_csv(slurp(dir / "d.csv"), &header);
  EXPECT_EQ(header, "E,S,beta");
  EXPECT_EQ(rows.size(), 512u);
  const auto peak = *std::max_element(rows.begin(), rows.end(),
                                      [](const auto& a, const auto& b) { return a[1] < b[1]; });
  EXPECT_NEAR(peak[0], 0.5, 1e-15);
  EXPECT_NEAR(peak[1], std::log(2.0), 1e-15);
  const std::string svg = slurp(dir / "d.svg");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("class=\"smax\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"zero-entropy\""), std::string::npos);
}

TEST(Diagram, DegenerateSpectrumRejected) {
  EXPECT_EQ(run_cli({"diagram", "--levels", "1,1"}).code, 2);
  EXPECT_EQ(run_cli({"diagram", "--levels", "0,1", "--samples", "2"}).code, 2);
}

TEST(Demon, Verdicts) {
  auto r = run_cli({"demon", "--levels", "0,1,2", "--state", "0.2,0.6,0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["feasible"].get<bool>());
  EXPECT_LT(j["witness_energy"].get<double>(), 1.0);
  EXPECT_EQ(j["witness_distribution"].size(), 3u);

  r = run_cli({"demon", "--levels", "0,1,2", "--state", "0.6,0.3,0.1"});
  ASSERT_EQ(r.code, 0);
  // (0.6, 0.3, 0.1) is not canonical, so some energy is extractable.
  EXPECT_TRUE(json::parse(r.out)["feasible"].get<bool>());

  r = run_cli({"demon", "--levels", "0,1,2", "--state", "1,0,0"});
  ASSERT_EQ(r.code, 0);
  j = json::parse(r.out);
  EXPECT_FALSE(j["feasible"].get<bool>());
  EXPECT_TRUE(j["witness_distribution"].is_null());
}

TEST(Demon, StableStateIsInfeasible) {
  const auto eq = json::parse(run_cli({"equilibrium", "--levels", "0,1,2", "--energy", "0.6"}).out);
  const auto r = run_cli({"demon", "--levels", "0,1,2", "--energy", "0.6", "--entropy",
                          cli::format_number(eq["entropy"].get<double>())});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(json::parse(r.out)["feasible"].get<bool>());
  EXPECT_EQ(json::parse(r.out)["branch"], "positive_temperature");
}

TEST(Demon, InfeasibleInputAndUsage) {
  EXPECT_EQ(run_cli({"demon", "--levels", "0,1,2", "--energy", "1", "--entropy", "3"}).code, 2);
  EXPECT_EQ(run_cli({"demon", "--levels", "0,1,2", "--energy", "1"}).code, 2);
  EXPECT_EQ(run_cli({"demon", "--levels", "0,1,2", "--state", "0.5,0.5"}).code, 2);
}

TEST(Criteria, ShannonAndTsallisReports) {
  auto r = run_cli({"criteria", "--candidate", "shannon", "--trials", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["passes_all"].get<bool>());
  EXPECT_EQ(j["criteria"].size(), 8u);

  r = run_cli({"criteria", "--candidate", "tsallis", "--q", "2", "--trials", "100"});
  ASSERT_EQ(r.code, 0);
  j = json::parse(r.out);
  EXPECT_EQ(j["criteria"][2]["verdict"], "fail");
  EXPECT_EQ(j["criteria"][2]["counterexample"]["check"], "additivity");
}

TEST(Criteria, ByteIdenticalUnderSeed) {
  const auto dir = scratch("criteria");
  for (const char* name : {"a", "b"}) {
    const auto r = run_cli({"criteria", "--candidate", "hartley", "--seed", "99", "--out",
                            (dir / (std::string(name) + ".json")).string(), "--table",
                            (dir / (std::string(name) + ".txt")).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt"));
  EXPECT_NE(slurp(dir / "a.txt").find("FAILED"), std::string::npos);
}

TEST(Criteria, UnknownCandidate) {
  EXPECT_EQ(run_cli({"criteria", "--candidate", "nope"}).code, 2);
  EXPECT_EQ(run_cli({"criteria", "--candidate", "shannon", "--trials", "10"}).code, 2);
}

TEST(Sweep, DistinctFilesPerPoint) {
  const auto dir = scratch("sweep");
  write(dir / "c.json", R"({"spectrum":[0,1,2],"initial":[0.5,0.2,0.3],"integrator":{"t_end":2}})");
  const auto r = run_cli({"sweep", "--config", (dir / "c.json").string(), "--param", "tau", "--values",
                          "0.5,1,2", "--out-dir", (dir / "out").string(), "--jobs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(fs::exists(dir / "out" / ("tau_" + std::to_string(i) + ".csv")));
    EXPECT_TRUE(fs::exists(dir / "out" / ("tau_" + std::to_string(i) + "_summary.json")));
  }
  // Larger tau relaxes more slowly.
  auto final_entropy = [&](int i) {
    return parse_csv(slurp(dir / "out" / ("tau_" + std::to_string(i) + ".csv")), nullptr).back()[5];
  };
  EXPECT_GT(final_entropy(0), final_entropy(1));
  EXPECT_GT(final_entropy(1), final_entropy(2));

  // Concurrency does not change the output.
  const auto serial = run_cli({"sweep", "--config", (dir / "c.json").string(), "--param", "tau", "--values",
                               "0.5,1,2", "--out-dir", (dir / "serial").string(), "--jobs", "1"});
  ASSERT_EQ(serial.code, 0);
  for (int i = 0; i < 3; ++i) {
    const std::string f = "tau_" + std::to_string(i) + ".csv";
    EXPECT_EQ(slurp(dir / "out" / f), slurp(dir / "serial" / f));
  }
}

TEST(Sweep, BadParamAndFailingPoint) {
  const auto dir = scratch("sweep_bad");
  write(dir / "c.json", R"({"spectrum":[0,1,2],"initial":[0.5,0.2,0.3],"integrator":{"t_end":1}})");
  EXPECT_EQ(run_cli({"sweep", "--config", (dir / "c.json").string(), "--param", "beta", "--values", "1",
                     "--out-dir", (dir / "o").string()})
                .code,
            2);
  const auto r = run_cli({"sweep", "--config", (dir / "c.json").string(), "--param", "tau", "--values", "1,-1",
                          "--out-dir", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(fs::exists(dir / "o" / "tau_0.csv"));
  EXPECT_FALSE(fs::exists(dir / "o" / "tau_1.csv"));
}

TEST(Dispatch, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"simulate", "--help"}).code, 0);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"equilibrium", "--levels", "0,1", "--energy", "0.5", "--bogus"}).code, 2);
}

}  // namespace
