#include <doctest.h>

#include <sys/wait.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli/commands.hpp"
#include "entropic/divergence.hpp"
#include "entropic/measures.hpp"
#include "entropic/rng.hpp"
#include "entropic/threads.hpp"

using namespace entropic;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "entropic_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_sample(const std::string& name, const Eigen::MatrixXd& x) {
  const std::string path = (test_dir() / name).string();
  save_points_csv(path, x);
  return path;
}

Eigen::MatrixXd uniform_sample(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) x(i, k) = rng.uniform01();
  return x;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ENTROPIC_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("the divergence command reports the library result with an interval") {
  const std::string p1 = write_sample("div_a.csv", uniform_sample(14, 1, 21));
  const std::string p2 = write_sample("div_b.csv", uniform_sample(14, 1, 22));

  cli::DivergenceArgs args;
  args.sample1_path = p1;
  args.sample2_path = p2;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_divergence(args, out, err) == 0);

  const nlohmann::json j = nlohmann::json::parse(out.str());
  const DivergenceBundle b =
      sinkhorn_divergence(DiscreteMeasure::from_samples(uniform_sample(14, 1, 21)),
                          DiscreteMeasure::from_samples(uniform_sample(14, 1, 22)),
                          quadratic_cost(), SinkhornConfig{});
  CHECK(std::fabs(j.at("sbar").get<double>() - b.sbar) <= 1e-15 * (1.0 + std::fabs(b.sbar)));
  CHECK(j.at("n1").get<int>() == 14);
  CHECK(j.at("n2").get<int>() == 14);
  CHECK(j.at("sigma2").get<double>() >= 0.0);
  CHECK(j.contains("dual_sbar"));
  CHECK(j.at("ci_lo").get<double>() <= j.at("sbar").get<double>());
  CHECK(j.at("sbar").get<double>() <= j.at("ci_hi").get<double>());
  CHECK(j.at("degenerate").get<bool>() == false);
}

TEST_CASE("commands map input and solver failures to distinct exit codes") {
  const std::string p1 = write_sample("code_a.csv", uniform_sample(8, 1, 31));
  const std::string p2 = write_sample("code_b.csv", uniform_sample(8, 1, 32));
  std::ostringstream out, err;

  cli::DivergenceArgs missing;
  missing.sample1_path = (test_dir() / "nope.csv").string();
  missing.sample2_path = p2;
  CHECK(cli::cmd_divergence(missing, out, err) == 2);

  cli::DivergenceArgs badcost;
  badcost.sample1_path = p1;
  badcost.sample2_path = p2;
  badcost.solver.cost = "no_such_cost";
  CHECK(cli::cmd_divergence(badcost, out, err) == 2);

  cli::DivergenceArgs stalled;
  stalled.sample1_path = p1;
  stalled.sample2_path = p2;
  stalled.solver.max_iter = 1;
  stalled.solver.tol = 1e-15;
  stalled.solver.epsilon = 0.05;
  CHECK(cli::cmd_divergence(stalled, out, err) == 3);

  cli::IndependenceArgs baddim;
  baddim.pairs_path = write_sample("code_pairs.csv", uniform_sample(10, 2, 33));
  baddim.dim_v = 2;
  CHECK(cli::cmd_independence(baddim, out, err) == 2);
}

TEST_CASE("the map command writes a grid evaluation as csv") {
  const std::string p1 = write_sample("map_a.csv", uniform_sample(10, 1, 41));
  const std::string p2 = write_sample("map_b.csv", uniform_sample(10, 1, 42));

  cli::MapArgs args;
  args.sample1_path = p1;
  args.sample2_path = p2;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_map(args, out, err) == 0);
  const std::string text = out.str();
  CHECK(text.rfind("x1,map1\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 65);  // header + 64 grid rows

  args.output_path = (test_dir() / "map_out.csv").string();
  std::ostringstream out2;
  REQUIRE(cli::cmd_map(args, out2, err) == 0);
  CHECK(out2.str().empty());
  CHECK(slurp(args.output_path) == text);
}

TEST_CASE("the band command emits a reproducible json band") {
  cli::BandArgs args;
  args.sample1_path = write_sample("band_a.csv", uniform_sample(12, 1, 51));
  args.sample2_path = write_sample("band_b.csv", uniform_sample(40, 1, 52));
  args.replicates = 25;
  args.seed = 7;
  args.output_csv = (test_dir() / "band.csv").string();

  std::ostringstream out1, out2, err;
  REQUIRE(cli::cmd_band(args, out1, err) == 0);
  REQUIRE(cli::cmd_band(args, out2, err) == 0);
  CHECK(out1.str() == out2.str());

  const nlohmann::json j = nlohmann::json::parse(out1.str());
  CHECK(j.at("b").get<int>() == 25);
  CHECK(j.at("half_width").get<double>() > 0.0);
  CHECK(j.at("grid").size() == j.at("center").size());

  const std::string csv = slurp(args.output_csv);
  CHECK(csv.rfind("x1,center,lower,upper\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(j.at("grid").size()) + 1);
}

TEST_CASE("the null test command reports a valid p-value and replicate dump") {
  cli::NullTestArgs args;
  args.sample1_path = write_sample("null_a.csv", uniform_sample(30, 1, 61));
  args.sample2_path = write_sample("null_b.csv", uniform_sample(30, 1, 62));
  args.replicates = 40;
  args.seed = 5;
  args.replicates_csv = (test_dir() / "null_reps.csv").string();

  std::ostringstream out, err;
  REQUIRE(cli::cmd_null_test(args, out, err) == 0);
  const nlohmann::json j = nlohmann::json::parse(out.str());
  CHECK(j.at("m").get<int>() == 6);  // 0.2 * 30
  CHECK(j.at("b").get<int>() == 40);
  CHECK_FALSE(j.contains("replicates"));
  const double p = j.at("p_value").get<double>();
  CHECK(p >= 1.0 / 41.0 - 1e-15);
  CHECK(p <= 1.0);
  CHECK(j.at("critical_0.95").get<double>() > 0.0);

  const std::string csv = slurp(args.replicates_csv);
  CHECK(csv.rfind("index,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
}

TEST_CASE("the independence command reports the permutation test summary") {
  cli::IndependenceArgs args;
  args.pairs_path = write_sample("indep_pairs.csv", uniform_sample(20, 2, 71));
  args.replicates = 19;
  args.seed = 3;

  std::ostringstream out, err;
  REQUIRE(cli::cmd_independence(args, out, err) == 0);
  const nlohmann::json j = nlohmann::json::parse(out.str());
  CHECK(j.at("n").get<int>() == 20);
  CHECK(j.at("b").get<int>() == 19);
  CHECK(j.at("scaled").get<double>() >= 0.0);
  const double p = j.at("p_value").get<double>();
  CHECK(p >= 1.0 / 20.0 - 1e-15);
  CHECK(p <= 1.0);
}

TEST_CASE("the calibration experiment is byte deterministic and validated") {
  cli::ExperimentConfig config;
  config.n = 20;
  config.outer_reps = 8;
  config.replicates = 20;
  config.m_fractions = {0.2, 0.5};
  config.solver.tol = 1e-7;
  config.seed = 11;

  const fs::path dir1 = test_dir() / "exp1";
  const fs::path dir2 = test_dir() / "exp2";
  std::ostringstream out1, out2, err;
  config.out_dir = dir1.string();
  REQUIRE(cli::cmd_experiment(config, out1, err) == 0);
  config.out_dir = dir2.string();
  REQUIRE(cli::cmd_experiment(config, out2, err) == 0);

  for (const char* name : {"statistics.csv", "histogram.csv", "ppdata.csv", "config.json"}) {
    CHECK(slurp((dir1 / name).string()) == slurp((dir2 / name).string()));
  }

  const nlohmann::json summary = nlohmann::json::parse(out1.str());
  CHECK(summary.at("outer_reps").get<int>() == 8);
  const auto& ks = summary.at("ks_to_uniform");
  CHECK(ks.at("m0.20").get<double>() >= 0.0);
  CHECK(ks.at("m0.20").get<double>() <= 1.0);
  CHECK(ks.contains("m0.50"));

  const std::string stats = slurp((dir1 / "statistics.csv").string());
  CHECK(stats.rfind("rep,n_sbar,rank_m0.20,rank_m0.50\n", 0) == 0);
  CHECK(std::count(stats.begin(), stats.end(), '\n') == 9);

  cli::ExperimentConfig bad = config;
  bad.out_dir.clear();
  std::ostringstream o, e;
  CHECK(cli::cmd_experiment(bad, o, e) == 2);
  bad = config;
  bad.out_dir = (test_dir() / "exp3").string();
  bad.m_fractions = {0.7};
  CHECK(cli::cmd_experiment(bad, o, e) == 2);
}

TEST_CASE("the binary wires subcommands to the expected exit codes") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("no-such-command") == 2);
  const std::string missing = (test_dir() / "ghost.csv").string();
  CHECK(run_cli("divergence " + missing + " " + missing) == 2);

  const std::string p1 = write_sample("bin_a.csv", uniform_sample(8, 1, 81));
  const std::string p2 = write_sample("bin_b.csv", uniform_sample(8, 1, 82));
  CHECK(run_cli("divergence " + p1 + " " + p2) == 0);
}

TEST_CASE("the thread count honors the environment override") {
  threads::set_max_threads(0);
  REQUIRE(setenv("ENTROPIC_THREADS", "2", 1) == 0);
  CHECK(threads::max_threads() == 2);
  REQUIRE(setenv("ENTROPIC_THREADS", "abc", 1) == 0);
  CHECK(threads::max_threads() >= 1);
  REQUIRE(setenv("ENTROPIC_THREADS", "0", 1) == 0);
  CHECK(threads::max_threads() >= 1);
  REQUIRE(setenv("ENTROPIC_THREADS", "-3", 1) == 0);
  CHECK(threads::max_threads() >= 1);

  threads::set_max_threads(3);
  CHECK(threads::max_threads() == 3);
  threads::set_max_threads(0);
  REQUIRE(unsetenv("ENTROPIC_THREADS") == 0);
  CHECK(threads::max_threads() >= 1);
}
