#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"

namespace {

void add_solver_options(CLI::App* cmd, entropic::cli::SolverOptions& s) {
  cmd->add_option("--epsilon", s.epsilon, "Regularization strength")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", s.tol, "Marginal residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", s.max_iter, "Solver sweep cap")->check(CLI::PositiveNumber);
  cmd->add_option("--cost", s.cost, "Ground cost name (quadratic)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic optimal transport estimation and inference"};
  app.require_subcommand(1);
  std::function<int()> run;

  entropic::cli::DivergenceArgs div;
  CLI::App* cdiv = app.add_subcommand(
      "divergence", "Sinkhorn divergence between two samples, with a CLT interval");
  cdiv->add_option("sample1", div.sample1_path, "CSV of points, one row each")->required();
  cdiv->add_option("sample2", div.sample2_path, "CSV of points, one row each")->required();
  cdiv->add_option("--alpha", div.alpha, "Interval miscoverage level");
  add_solver_options(cdiv, div.solver);
  cdiv->callback([&] { run = [&] { return cmd_divergence(div, std::cout, std::cerr); }; });

  entropic::cli::MapArgs map;
  CLI::App* cmap = app.add_subcommand("map", "Entropic transport map on a grid");
  cmap->add_option("sample1", map.sample1_path, "CSV of source points")->required();
  cmap->add_option("sample2", map.sample2_path, "CSV of target points")->required();
  cmap->add_option("--grid", map.grid_path, "JSON grid spec (point list or box)");
  cmap->add_option("--output", map.output_path, "Write CSV here instead of stdout");
  add_solver_options(cmap, map.solver);
  cmap->callback([&] { run = [&] { return cmd_map(map, std::cout, std::cerr); }; });

  entropic::cli::BandArgs band;
  CLI::App* cband = app.add_subcommand(
      "band", "Bootstrap uniform confidence band for one map coordinate");
  cband->add_option("sample1", band.sample1_path, "CSV of source points")->required();
  cband->add_option("sample2", band.sample2_path, "CSV of target points (resampled)")->required();
  cband->add_option("--grid", band.grid_path, "JSON grid spec (point list or box)");
  cband->add_option("--coordinate", band.coordinate, "Map coordinate index (0-based)");
  cband->add_option("--alpha", band.alpha, "Band miscoverage level");
  cband->add_option("-B,--replicates", band.replicates, "Bootstrap replicates");
  cband->add_option("--seed", band.seed, "Replicate seed base");
  cband->add_option("--output-csv", band.output_csv, "Also write the band as CSV here");
  add_solver_options(cband, band.solver);
  cband->callback([&] { run = [&] { return cmd_band(band, std::cout, std::cerr); }; });

  entropic::cli::NullTestArgs nt;
  CLI::App* cnull = app.add_subcommand(
      "null-test", "m-out-of-n bootstrap calibration of the scaled divergence");
  cnull->add_option("sample1", nt.sample1_path, "CSV of points")->required();
  cnull->add_option("sample2", nt.sample2_path, "CSV of points")->required();
  cnull->add_option("-m,--subsample", nt.m, "Bootstrap subsample size");
  cnull->add_option("--m-fraction", nt.m_fraction, "Subsample size as a fraction of n");
  cnull->add_option("-B,--replicates", nt.replicates, "Bootstrap replicates");
  cnull->add_option("--seed", nt.seed, "Replicate seed base");
  cnull->add_option("--replicates-csv", nt.replicates_csv, "Write replicate values here");
  add_solver_options(cnull, nt.solver);
  cnull->callback([&] { run = [&] { return cmd_null_test(nt, std::cout, std::cerr); }; });

  entropic::cli::IndependenceArgs ind;
  CLI::App* cind = app.add_subcommand(
      "independence", "Permutation test of independence on paired columns");
  cind->add_option("pairs", ind.pairs_path, "CSV of paired rows (v columns then w columns)")
      ->required();
  cind->add_option("--dim-v", ind.dim_v, "Number of leading columns forming v")
      ->check(CLI::PositiveNumber);
  cind->add_option("-B,--replicates", ind.replicates, "Permutation replicates");
  cind->add_option("--seed", ind.seed, "Permutation seed base");
  cind->add_option("--cap", ind.cap, "Sample size cap (the product side has n^2 atoms)");
  cind->add_option("--replicates-csv", ind.replicates_csv, "Write permutation values here");
  add_solver_options(cind, ind.solver);
  cind->callback([&] { run = [&] { return cmd_independence(ind, std::cout, std::cerr); }; });

  std::string exp_config_path;
  entropic::cli::ExperimentConfig exp;
  int exp_n = 0, exp_reps = 0, exp_B = 0, exp_max_iter = 0;
  double exp_eps = 0.0, exp_tol = 0.0;
  std::uint64_t exp_seed = 0;
  std::vector<double> exp_fractions;
  CLI::App* cexp = app.add_subcommand(
      "experiment", "Bootstrap rank-uniformity experiment on uniform-box samples");
  cexp->add_option("--config", exp_config_path, "JSON experiment config");
  CLI::Option* on = cexp->add_option("--n", exp_n, "Sample size per replicate");
  CLI::Option* oreps = cexp->add_option("--outer-reps", exp_reps, "Outer repetitions");
  CLI::Option* ob = cexp->add_option("-B,--replicates", exp_B, "Bootstrap replicates");
  CLI::Option* oeps = cexp->add_option("--epsilon", exp_eps, "Regularization strength");
  CLI::Option* otol = cexp->add_option("--tol", exp_tol, "Marginal residual tolerance");
  CLI::Option* omax = cexp->add_option("--max-iter", exp_max_iter, "Solver sweep cap");
  CLI::Option* oseed = cexp->add_option("--seed", exp_seed, "Base seed");
  CLI::Option* ofrac = cexp->add_option("--m-fractions", exp_fractions,
                                        "Subsample fractions of n");
  CLI::Option* oout = cexp->add_option("--out", exp.out_dir, "Output directory");
  cexp->callback([&] {
    run = [&] {
      std::string out_dir_flag = exp.out_dir;
      if (!exp_config_path.empty()) {
        std::ifstream in(exp_config_path);
        if (!in) {
          std::cerr << "error: cannot open config: " << exp_config_path << "\n";
          return 2;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
          exp = entropic::cli::load_experiment_config(ss.str());
        } catch (const std::exception& e) {
          std::cerr << "error: " << e.what() << "\n";
          return 2;
        }
      }
      if (*on) exp.n = exp_n;
      if (*oreps) exp.outer_reps = exp_reps;
      if (*ob) exp.replicates = exp_B;
      if (*oeps) exp.solver.epsilon = exp_eps;
      if (*otol) exp.solver.tol = exp_tol;
      if (*omax) exp.solver.max_iter = exp_max_iter;
      if (*oseed) exp.seed = exp_seed;
      if (*ofrac) exp.m_fractions = exp_fractions;
      if (*oout) exp.out_dir = out_dir_flag;
      return cmd_experiment(exp, std::cout, std::cerr);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run();
}
