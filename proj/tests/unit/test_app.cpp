#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gds/app/commands.hpp"
#include "oracles.hpp"

namespace {

using namespace gds;
using nlohmann::json;

struct CliResult {
  int code;
  std::string err;
};

CliResult run_cli(const std::string& args, const oracle::TempDir& dir) {
  const std::string err_path = dir.str("stderr.txt");
  const std::string cmd = std::string(GDS_CLI_PATH) + " " + args + " > " + dir.str("stdout.txt") + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, oracle::slurp(err_path)};
}

json read_json(const std::filesystem::path& p) { return json::parse(oracle::slurp(p)); }

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

// ---- config handling

TEST(Config, ParsesFileAndRejectsUnknownKeys) {
  const json j = {{"command", "run"},
                  {"model", {{"name", "lin_reg"}, {"n", 50}, {"k", 3}, {"T", 2}, {"design", "cross_section"}}},
                  {"M", 500},
                  {"N", 40},
                  {"scale", 2.0},
                  {"seed", 9},
                  {"study", {{"k", {5}}, {"n", {200, 2000}}}}};
  const app::RunConfig c = app::config_from_json(j);
  EXPECT_EQ(c.model.name, "lin_reg");
  EXPECT_EQ(c.model.t_per_unit.value(), 2);
  EXPECT_EQ(c.model.design, "cross_section");
  EXPECT_EQ(c.M, 500u);
  EXPECT_EQ(*c.scale, 2.0);
  EXPECT_EQ(c.study.n.size(), 2u);
  EXPECT_EQ(c.model.name, app::config_from_json({{"model", "lin_reg"}}).model.name);

  EXPECT_THROW(app::config_from_json({{"Mx", 5}}), ConfigError);
  EXPECT_THROW(app::config_from_json({{"model", {{"name", "x"}, {"bogus", 1}}}}), ConfigError);
  EXPECT_THROW(app::config_from_json({{"M", "many"}}), ConfigError);
  EXPECT_THROW(app::config_from_json(json::array()), ConfigError);
}

TEST(Config, FileErrors) {
  oracle::TempDir dir("cfg");
  EXPECT_THROW(app::load_config_file(dir.str("missing.json")), IoError);
  write_text(dir.path() / "bad.json", "{ not json");
  EXPECT_THROW(app::load_config_file(dir.str("bad.json")), ConfigError);
}

TEST(Config, Validation) {
  app::RunConfig c;
  c.command = "run";
  c.model.name = "cauchy_normal";
  EXPECT_NO_THROW(app::validate(c));
  auto fails = [&](auto mutate) {
    app::RunConfig x = c;
    mutate(x);
    EXPECT_THROW(app::validate(x), ConfigError);
  };
  fails([](auto& x) { x.command = "plot"; });
  fails([](auto& x) { x.model.name.clear(); });
  fails([](auto& x) { x.M = 99; });
  fails([](auto& x) { x.N = 0; });
  fails([](auto& x) { x.workers = 0; });
  fails([](auto& x) { x.scale = 2.0, x.s0 = 1.0; });
  fails([](auto& x) { x.scale = 0.0; });
  fails([](auto& x) { x.s0 = -1.0; });
  fails([](auto& x) { x.model.design = "other"; });
  c.command = "evidence-study";
  fails([](auto& x) { x.study.scale.clear(); });
  fails([](auto& x) { x.study.replicates = 0; });
  fails([](auto& x) { x.study.M = {50}; });
  fails([](auto& x) { x.study.scale = {0.0}; });
  fails([](auto& x) { x.N = 20; });
}

TEST(Config, HashIgnoresWorkersAndOutput) {
  app::RunConfig c;
  c.command = "run";
  c.model.name = "cauchy_normal";
  const std::string h = app::config_hash(c);
  app::RunConfig d = c;
  d.workers = 8;
  d.out = "/elsewhere/";
  EXPECT_EQ(app::config_hash(d), h);
  d.seed = 2;
  EXPECT_NE(app::config_hash(d), h);
  EXPECT_NE(app::config_hash(c, "unit_id,t,y,x1\n"), h);
}

TEST(Errors, ExitCodesAndRecords) {
  std::ostringstream err;
  app::RunConfig c;
  c.command = "run";
  c.model.name = "cauchy_normal";
  c.M = 10;
  EXPECT_EQ(app::execute(c, err), 2);
  EXPECT_EQ(json::parse(err.str())["error"]["type"], "config_error");

  err.str("");
  c.M = 1000;
  c.model.name = "lin_reg";
  c.data = "/nonexistent/data.csv";
  EXPECT_EQ(app::execute(c, err), 4);
  EXPECT_EQ(json::parse(err.str())["error"]["type"], "io_error");

  oracle::TempDir dir("err");
  err.str("");
  c.model.name = "cauchy_normal";
  c.data.clear();
  c.scale = 1.0;
  c.M = 20000;
  c.out = dir.str("x_");
  EXPECT_EQ(app::execute(c, err), 3);
  const json rec = json::parse(err.str())["error"];
  EXPECT_EQ(rec["type"], "dominance_violation");
  EXPECT_GT(rec["log_phi"].get<double>(), 0.0);
  EXPECT_EQ(rec["exit_code"], 3);
}

TEST(Errors, Classification) {
  EXPECT_EQ(app::exit_code_for(AttemptCapExceeded("x", 1.0, 5)), 3);
  EXPECT_EQ(app::error_type(AttemptCapExceeded("x", 1.0, 5)), "attempt_cap_exceeded");
  EXPECT_EQ(app::error_record(AttemptCapExceeded("x", 1.5, 5))["error"]["attempts"], 5);
  EXPECT_EQ(app::exit_code_for(DataError("x")), 2);
  EXPECT_EQ(app::exit_code_for(TuningFailed("x")), 3);
  EXPECT_EQ(app::error_type(ConvergenceError("x", Vector::Zero(1), -1.0, 3)), "convergence_error");
  EXPECT_EQ(app::exit_code_for(std::runtime_error("x")), 3);
}

// ---- the binary

TEST(Cli, RunWritesDrawsAndDiagnostics) {
  oracle::TempDir dir("cli_run");
  const auto r = run_cli("run --model cauchy_normal --M 2000 --N 200 --scale 200 --seed 3 "
                         "--tolerate-tail-violations --out " + dir.str("c_"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(oracle::count_lines(dir.path() / "c_draws.csv"), 201u);
  std::ifstream in(dir.path() / "c_draws.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "draw_index,attempts,threshold_v,p1,p2");
  const json diag = read_json(dir.path() / "c_diagnostics.json");
  EXPECT_EQ(diag["M"], 2000);
  EXPECT_EQ(diag["N"], 200);
  EXPECT_EQ(diag["scale"], 200.0);
  EXPECT_EQ(diag["parameter_names"]["p2"], "Theta");
  EXPECT_TRUE(diag["log_marginal_likelihood"].is_number());
  EXPECT_NEAR(diag["gamma_hat"].get<double>(), diag["acceptance_rate"].get<double>(), 1e-15);
  for (const char* stage : {"mode", "proposals", "accept_reject"}) {
    EXPECT_GE(diag["wall_time_seconds"][stage].get<double>(), 0.0);
  }
}

TEST(Cli, DrawsAreBitIdenticalAcrossWorkersAndReruns) {
  oracle::TempDir dir("cli_det");
  std::string first;
  for (int w : {1, 4, 8, 1}) {
    const std::string prefix = dir.str("w" + std::to_string(w) + "_");
    const auto r = run_cli("run --model cauchy_normal --M 1000 --N 80 --scale 200 --seed 5 "
                           "--tolerate-tail-violations --workers " + std::to_string(w) + " --out " + prefix, dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string draws = oracle::slurp(prefix + "draws.csv");
    if (first.empty()) first = draws;
    EXPECT_EQ(draws, first) << "workers " << w;
  }
}

TEST(Cli, FlagsOverrideTheConfigFile) {
  oracle::TempDir dir("cli_override");
  write_text(dir.path() / "cfg.json",
             R"({"model": "cauchy_normal", "M": 5000, "N": 10, "scale": 200, "seed": 4,
                 "tolerate_tail_violations": true})");
  const auto r = run_cli("run --config " + dir.str("cfg.json") + " --M 300 --N 35 --out " + dir.str("o_"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json diag = read_json(dir.path() / "o_diagnostics.json");
  EXPECT_EQ(diag["M"], 300);
  EXPECT_EQ(diag["N"], 35);
  EXPECT_EQ(diag["seed"], 4);
  EXPECT_EQ(diag["scale"], 200.0);
}

TEST(Cli, BundledCauchyDemo) {
  oracle::TempDir dir("cli_demo");
  const auto r = run_cli("run --config " + std::string(GDS_SOURCE_DIR) + "/configs/cauchy_demo.json --out " +
                             dir.str("demo_"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json diag = read_json(dir.path() / "demo_diagnostics.json");
  const double rate = diag["acceptance_rate"];
  EXPECT_GT(rate, 0.005);
  EXPECT_LT(rate, 0.03);
  EXPECT_EQ(diag["M"], 20000);
  EXPECT_EQ(oracle::count_lines(dir.path() / "demo_draws.csv"), 201u);
}

TEST(Cli, LinRegEvidenceMatchesClosedForm) {
  oracle::TempDir dir("cli_lr");
  ASSERT_EQ(run_cli("simulate --model lin_reg --k 5 --n 200 --seed 12 --out " + dir.str("lr.csv"), dir).code, 0);
  const auto r = run_cli("run --model lin_reg --data " + dir.str("lr.csv") +
                             " --M 1000 --N 100 --scale 2 --seed 3 --out " + dir.str("lr_"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json diag = read_json(dir.path() / "lr_diagnostics.json");
  const Dataset data = read_dataset_csv(dir.str("lr.csv"));
  const double truth = analytic_log_evidence_linreg(data, LinRegHyper::defaults(6));
  EXPECT_LE(std::abs(diag["log_marginal_likelihood"].get<double>() - truth) / std::abs(truth), 0.01);
  EXPECT_EQ(diag["parameter_names"]["p7"], "sigma2");
}

TEST(Cli, HierGaussDrawsAreOnTheConstrainedScale) {
  oracle::TempDir dir("cli_hg");
  ASSERT_EQ(run_cli("simulate --model hier_gauss --n 5 --k 2 --T 10 --seed 2 --out " + dir.str("hg.csv"), dir).code,
            0);
  const auto r = run_cli("run --model hier_gauss --data " + dir.str("hg.csv") + " --M 2000 --N 30 --seed 1 --tolerate-tail-violations --out " +
                             dir.str("hg_"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json diag = read_json(dir.path() / "hg_diagnostics.json");
  EXPECT_EQ(diag["dimension"], 5 * 2 + 2 + 3);
  EXPECT_EQ(diag["parameter_names"]["p13"], "Omega[1,1]");
  std::ifstream in(dir.path() / "hg_draws.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(std::stod(cell));
    ASSERT_EQ(cols.size(), 18u);
    EXPECT_GT(cols[3 + 12], 0.0);  // Omega[1,1]
    EXPECT_GT(cols[3 + 14], 0.0);  // Omega[2,2]
  }
}

TEST(Cli, EvidenceStudySingleCell) {
  oracle::TempDir dir("cli_study");
  const auto r = run_cli("evidence-study --k 2 --n 40 --M 200 --N 40 --scale 0.5 --replicates 1 --out " +
                             dir.str("s_"), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(oracle::count_lines(dir.path() / "s_report.csv"), 2u);
  std::ifstream in(dir.path() / "s_report.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("k,n,M,scale,replicates,", 0), 0u);
  EXPECT_EQ(row.rfind("2,40,200,0.5,1,", 0), 0u);
}

TEST(Cli, ParseAndConfigErrors) {
  oracle::TempDir dir("cli_err");
  auto r = run_cli("launch", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["type"], "config_error");
  r = run_cli("run --model cauchy_normal --M 50 --out " + dir.str("x_"), dir);
  EXPECT_EQ(r.code, 2);
  r = run_cli("run --config " + dir.str("nope.json"), dir);
  EXPECT_EQ(r.code, 4);
  r = run_cli("run --model lin_reg --out " + dir.str("x_"), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--data"), std::string::npos);
}

}  // namespace
