#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace entropic::cli {

struct SolverOptions {
  double epsilon = 1.0;
  double tol = 1e-9;
  int max_iter = 10000;
  std::string cost = "quadratic";
};

// All commands write their result to `out`, diagnostics to `err`, and return
// a process exit code: 0 success, 2 bad input or IO, 3 numerical failure.

struct DivergenceArgs {
  std::string sample1_path;
  std::string sample2_path;
  double alpha = 0.05;  // interval level, used when the samples have equal size
  SolverOptions solver;
};
int cmd_divergence(const DivergenceArgs& args, std::ostream& out, std::ostream& err);

struct MapArgs {
  std::string sample1_path;
  std::string sample2_path;
  std::string grid_path;    // JSON grid spec; empty = default grid
  std::string output_path;  // CSV file; empty = write to `out`
  SolverOptions solver;
};
int cmd_map(const MapArgs& args, std::ostream& out, std::ostream& err);

struct BandArgs {
  std::string sample1_path;
  std::string sample2_path;
  std::string grid_path;    // JSON grid spec; empty = default grid
  std::string output_csv;   // optional CSV dump of the band
  int coordinate = 0;
  double alpha = 0.1;
  int replicates = 200;
  std::uint64_t seed = 1;
  SolverOptions solver;
};
int cmd_band(const BandArgs& args, std::ostream& out, std::ostream& err);

struct NullTestArgs {
  std::string sample1_path;
  std::string sample2_path;
  int m = 0;                   // 0 = derive from m_fraction
  double m_fraction = 0.2;
  int replicates = 500;
  std::uint64_t seed = 1;
  std::string replicates_csv;  // optional CSV dump of the replicates
  SolverOptions solver;
};
int cmd_null_test(const NullTestArgs& args, std::ostream& out, std::ostream& err);

struct IndependenceArgs {
  std::string pairs_path;  // one CSV, the first dim_v columns are V
  int dim_v = 1;
  int replicates = 200;
  std::uint64_t seed = 1;
  int cap = 300;
  std::string replicates_csv;  // optional CSV dump of the permutation values
  SolverOptions solver;
};
int cmd_independence(const IndependenceArgs& args, std::ostream& out, std::ostream& err);

// Bootstrap calibration experiment: outer_reps times, draw two samples of
// size n from the uniform law on the box, run the m-out-of-n bootstrap for
// each fraction, and record where the observed scaled statistic ranks among
// its replicates. Under this null the ranks are approximately uniform.
// Writes statistics.csv, histogram.csv, ppdata.csv, config.json to out_dir
// and prints a JSON summary with the per-fraction KS distances to uniform.
struct ExperimentConfig {
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd upper = Eigen::VectorXd::Ones(1);
  int n = 200;
  std::vector<double> m_fractions = {0.1, 0.2};
  int outer_reps = 100;
  int replicates = 200;
  SolverOptions solver;
  std::uint64_t seed = 1;
  std::string out_dir;
};

// Parses the JSON config text; missing keys keep their defaults. Recognized
// keys: box.lower, box.upper, n, m_fractions, outer_reps, replicates,
// epsilon, tol, max_iter, seed, out_dir.
ExperimentConfig load_experiment_config(const std::string& json_text);

int cmd_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace entropic::cli
