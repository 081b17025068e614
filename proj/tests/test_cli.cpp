#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qpd/cli/app.hpp"
#include "qpd/cli/config.hpp"
#include "qpd/cli/runner.hpp"

using namespace qpd;
using namespace qpd::cli;
namespace fs = std::filesystem;

namespace {

std::string config_error_key(const std::string& text, const Environment& env = {}) {
  try {
    parse_config(text, env);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const Environment& env = {}) {
  args.insert(args.begin(), "qpd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.status = run_cli(static_cast<int>(argv.size()), argv.data(), env, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qpd_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

TEST_CASE("defaults resolve to a valid configuration", "[cli]") {
  const RunConfig cfg = parse_config("", {});
  CHECK(cfg.scenario == Scenario::ClassA);
  CHECK(cfg.mode == EvolutionMode::ClosedForm);
  CHECK(cfg.n_steps == 2000);
  CHECK(cfg.time_grid().size() == 2001);
  CHECK(cfg.time_grid().front() == 0.0);
  CHECK_THAT(cfg.time_grid().back() * gamma0(cfg.physics), Catch::Matchers::WithinRel(10.0, 1e-14));
}

TEST_CASE("sectioned file binds every key", "[cli]") {
  const RunConfig cfg = parse_config(R"(
# comment
[scenario]
name = bell_minus
p = 0.3
[physics]
lambda_sq = 0.02
omega0 = 2
r = 0.75
dipole_cos = 1
[time]
t_max = 50
n_steps = 10
time_units = absolute
[run]
mode = quadrature
jobs = 3
[sweep]
r = 0.5, 1, 2
p = 0.1 0.9
[output]
prefix = out/run1
gnuplot = true
)",
                                     {});
  CHECK(cfg.scenario == Scenario::BellMinus);
  CHECK(cfg.p == 0.3);
  CHECK(cfg.physics.lambda_sq == 0.02);
  CHECK(cfg.physics.omega0 == 2.0);
  CHECK(cfg.physics.r == 0.75);
  CHECK(cfg.physics.dipole_cos == 1.0);
  CHECK(cfg.physics.cutoff_eps == 1e-3 / 2.0);
  CHECK(cfg.t_max == 50.0);
  CHECK(cfg.n_steps == 10);
  CHECK(cfg.time_units == TimeUnits::Absolute);
  CHECK(cfg.mode == EvolutionMode::Quadrature);
  CHECK(cfg.jobs == 3);
  CHECK(*cfg.sweep_r == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(*cfg.sweep_p == std::vector<double>{0.1, 0.9});
  CHECK(cfg.out_prefix == "out/run1");
  CHECK(cfg.gnuplot);
  CHECK(sweep_points(cfg).size() == 6);
}

TEST_CASE("resolved text parses back to the same configuration", "[cli]") {
  const RunConfig a = parse_config("[sweep]\nr = 0.2 20\n[physics]\ncutoff_eps = 2e-4\n", {});
  const RunConfig b = parse_config(a.to_text(), {});
  CHECK(a.to_text() == b.to_text());
}

TEST_CASE("environment overrides sit between file and flags", "[cli]") {
  const Environment env{{"QPD_PHYSICS_R", "3.5"}, {"QPD_SWEEP_P", "0.2 0.4"}};
  const RunConfig cfg = parse_config("[physics]\nr = 1\n", env);
  CHECK(cfg.physics.r == 3.5);
  CHECK(*cfg.sweep_p == std::vector<double>{0.2, 0.4});
  CHECK(env_name("physics.lambda_sq") == "QPD_PHYSICS_LAMBDA_SQ");
  for (const auto& key : known_keys()) CHECK(env_name(key).rfind("QPD_", 0) == 0);
}

TEST_CASE("config errors name the offending key", "[cli]") {
  CHECK(config_error_key("[physics]\nlambda_sq = -1\n") == "physics.lambda_sq");
  CHECK(config_error_key("[physics]\nomega0 = zero\n") == "physics.omega0");
  CHECK(config_error_key("[physics]\nr = 0\n") == "physics.r");
  CHECK(config_error_key("[physics]\ndipole_cos = 2\n") == "physics.dipole_cos");
  CHECK(config_error_key("[physics]\nbogus = 1\n") == "physics.bogus");
  CHECK(config_error_key("[scenario]\nname = ghz\n") == "scenario.name");
  CHECK(config_error_key("[scenario]\np = 1.5\n") == "scenario.p");
  CHECK(config_error_key("[time]\nn_steps = 1\n") == "time.n_steps");
  CHECK(config_error_key("[time]\nt_max = -2\n") == "time.t_max");
  CHECK(config_error_key("[time]\ntime_units = hours\n") == "time.time_units");
  CHECK(config_error_key("[run]\nmode = euler\n") == "run.mode");
  CHECK(config_error_key("[run]\njobs = 0\n") == "run.jobs");
  CHECK(config_error_key("[sweep]\nr =\n") == "sweep.r");
  CHECK(config_error_key("[sweep]\np = []\n") == "sweep.p");
  CHECK(config_error_key("[sweep]\nr = 1 -2\n") == "sweep.r");
  CHECK(config_error_key("[scenario]\nname = bell_plus\n[run]\ncompare_markov = true\n") ==
        "run.compare_markov");
  CHECK(config_error_key("", {{"QPD_RUN_JOBS", "many"}}) == "run.jobs");
  CHECK(config_error_key("", {{"QPD_NOT_A_KEY", "1"}}) == "QPD_NOT_A_KEY");
}

TEST_CASE("cli exit codes", "[cli]") {
  const fs::path dir = scratch("exit_codes");
  CHECK(run({"--help"}).status == 0);
  CHECK(run({"rates"}).status == 0);

  CliRun bad = run({"rates", "--mode", "euler"});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("--mode") != std::string::npos);

  bad = run({"rates"}, {{"QPD_PHYSICS_LAMBDA_SQ", "-1"}});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("physics.lambda_sq") != std::string::npos);

  const std::string cfg = write_file(dir / "empty_sweep.ini", "[sweep]\nr =\n");
  bad = run({"sweep", "--config", cfg});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("sweep.r") != std::string::npos);

  bad = run({"compare-markov"}, {{"QPD_SCENARIO_NAME", "bell_plus"}});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("run.compare_markov") != std::string::npos);

  CHECK(run({"evolve", "--config", (dir / "missing.ini").string()}).status == 2);
  CHECK(run({"evolve", "--jobs", "x"}).status == 2);
  CHECK(run({}).status == 2);
}

TEST_CASE("rates prints the derived rates and warnings", "[cli]") {
  const CliRun r = run({"rates"}, {{"QPD_SWEEP_R", "0.001 1"}, {"QPD_PHYSICS_LAMBDA_SQ", "0.2"}});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("r,gamma0,gamma_r,gamma_r_over_gamma0,sigma,sigma_over_gamma0") !=
        std::string::npos);
  CHECK(lines(r.out).size() == 4);
  CHECK(r.err.find("weak-coupling") != std::string::npos);
  CHECK(r.err.find("cutoff") != std::string::npos);

  const CliRun rwa = run({"rates"}, {{"QPD_PHYSICS_R", "2000"}});
  REQUIRE(rwa.status == 0);
  CHECK(rwa.err.find("rotating-wave") != std::string::npos);
}

TEST_CASE("evolve writes the trajectory, summary and metadata", "[cli]") {
  const fs::path dir = scratch("evolve");
  const std::string prefix = (dir / "a").string();
  const Environment env{{"QPD_TIME_N_STEPS", "40"}, {"QPD_SCENARIO_P", "0.8"}};
  const CliRun r = run({"evolve", "--out", prefix}, env);
  REQUIRE(r.status == 0);

  const auto traj = lines(slurp(prefix + "_trajectory.csv"));
  REQUIRE(traj.size() == 42);
  CHECK(traj[0] ==
        "t,rho00,rho0101,rho1010,rho1111,re_rho_IO,im_rho_IO,re_rho_0110,im_rho_0110,concurrence,"
        "concurrence_markov,purity,min_eig");
  const auto first = cells(traj[1]);
  REQUIRE(first.size() == 13);
  CHECK(first[0] == "0");
  CHECK(first[1] == "0.2");
  CHECK(first[4] == "0.8");
  CHECK(first[10].empty());
  CHECK(cells(traj.back())[0] == "10");

  const auto summary = lines(slurp(prefix + "_summary.csv"));
  REQUIRE(summary.size() == 2);
  CHECK(summary[0] == "r,p,death_t1,revival_t1,min_concurrence,final_vacuum_pop");
  CHECK(fs::exists(prefix + "_meta.txt"));
  CHECK_FALSE(fs::exists(prefix + ".INCOMPLETE"));
  CHECK_FALSE(fs::exists(prefix + ".gp"));
}

TEST_CASE("reruns are byte-identical for any job count", "[cli]") {
  const fs::path dir = scratch("determinism");
  const Environment env{{"QPD_TIME_N_STEPS", "300"},
                        {"QPD_SWEEP_R", "0.2 1 20"},
                        {"QPD_SCENARIO_P", "0.8"},
                        {"QPD_OUTPUT_GNUPLOT", "true"}};
  const std::string a = (dir / "a").string();
  const std::string b = (dir / "b").string();
  REQUIRE(run({"compare-markov", "--out", a, "--jobs", "1"}, env).status == 0);
  REQUIRE(run({"compare-markov", "--out", b, "--jobs", "4"}, env).status == 0);
  for (const char* suffix : {"_trajectory_000.csv", "_trajectory_001.csv", "_trajectory_002.csv",
                             "_summary.csv", "_markov_summary.csv"}) {
    INFO(suffix);
    CHECK(slurp(a + suffix) == slurp(b + suffix));
  }
  const std::string first = slurp(a + "_summary.csv");
  REQUIRE(run({"compare-markov", "--out", a, "--jobs", "2"}, env).status == 0);
  CHECK(slurp(a + "_summary.csv") == first);
  CHECK(fs::exists(a + ".gp"));

  const auto row = cells(lines(slurp(a + "_trajectory_000.csv"))[5]);
  CHECK_FALSE(row[10].empty());
}

TEST_CASE("bell_minus at w0 r = 0.5 shows no death", "[cli]") {
  const fs::path dir = scratch("bell_minus");
  const std::string prefix = (dir / "b").string();
  const Environment env{{"QPD_SCENARIO_NAME", "bell_minus"}, {"QPD_SWEEP_R", "0.5"},
                        {"QPD_TIME_N_STEPS", "200"}};
  REQUIRE(run({"sweep", "--out", prefix}, env).status == 0);
  const auto row = cells(lines(slurp(prefix + "_summary.csv"))[1]);
  REQUIRE(row.size() == 6);
  CHECK(row[2].empty());
  CHECK(row[3].empty());
  CHECK(std::stod(row[4]) > 0.0);
}

TEST_CASE("class_a p = 0.8 at w0 r = 0.2: no death, Markov death and revival", "[cli]") {
  const fs::path dir = scratch("small_r");
  const std::string prefix = (dir / "s").string();
  const Environment env{{"QPD_SCENARIO_P", "0.8"}, {"QPD_SWEEP_R", "0.2"},
                        {"QPD_TIME_N_STEPS", "1000"}};
  REQUIRE(run({"compare-markov", "--out", prefix}, env).status == 0);
  const auto exact = cells(lines(slurp(prefix + "_summary.csv"))[1]);
  const auto markov = cells(lines(slurp(prefix + "_markov_summary.csv"))[1]);
  CHECK(exact[2].empty());
  CHECK(exact[3].empty());
  REQUIRE_FALSE(markov[2].empty());
  REQUIRE_FALSE(markov[3].empty());
  CHECK(std::stod(markov[3]) > std::stod(markov[2]));
}

TEST_CASE("class_a p = 0.8 at w0 r = 20: death without revival in both", "[cli_regime]") {
  const fs::path dir = scratch("large_r");
  const std::string prefix = (dir / "l").string();
  const Environment env{{"QPD_SCENARIO_P", "0.8"}, {"QPD_SWEEP_R", "20"},
                        {"QPD_TIME_N_STEPS", "1000"}};
  REQUIRE(run({"compare-markov", "--out", prefix}, env).status == 0);
  const auto exact = cells(lines(slurp(prefix + "_summary.csv"))[1]);
  const auto markov = cells(lines(slurp(prefix + "_markov_summary.csv"))[1]);
  CHECK_FALSE(exact[2].empty());
  CHECK(exact[3].empty());
  CHECK_FALSE(markov[2].empty());
  CHECK(markov[3].empty());
}

TEST_CASE("numerical failure exits 3 and flags partial outputs", "[cli]") {
  const fs::path dir = scratch("failure");
  const std::string prefix = (dir / "q").string();
  const Environment env{{"QPD_SCENARIO_P", "1"}, {"QPD_TIME_N_STEPS", "100"},
                        {"QPD_TIME_T_MAX", "2000"}, {"QPD_TIME_TIME_UNITS", "absolute"}};
  const CliRun r = run({"evolve", "--mode", "quadrature", "--out", prefix, "--jobs", "4"}, env);
  REQUIRE(r.status == 3);
  CHECK(r.err.find("numerical failure") != std::string::npos);
  REQUIRE(fs::exists(prefix + ".INCOMPLETE"));
  const auto traj = lines(slurp(prefix + "_trajectory.csv"));
  CHECK(traj.size() >= 2);
  CHECK(traj.size() < 102);

  // A later successful run clears the marker.
  REQUIRE(run({"evolve", "--out", prefix}, env).status == 0);
  CHECK_FALSE(fs::exists(prefix + ".INCOMPLETE"));
}
