#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "entropic/divergence.hpp"
#include "entropic/errors.hpp"
#include "entropic/independence.hpp"
#include "entropic/inference.hpp"
#include "entropic/measures.hpp"
#include "entropic/potentials.hpp"
#include "entropic/stats.hpp"

namespace entropic::cli {

namespace {

template <typename Body>
int guarded(Body&& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

SinkhornConfig sinkhorn_config(const SolverOptions& s) {
  SinkhornConfig c;
  c.epsilon = s.epsilon;
  c.tol = s.tol;
  c.max_iter = s.max_iter;
  return c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fraction_label(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", f);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Eigen::MatrixXd resolve_grid(const std::string& grid_path, const DiscreteMeasure& m1,
                             const DiscreteMeasure& m2) {
  if (grid_path.empty()) return default_grid(m1, m2);
  return parse_grid_json(read_text_file(grid_path));
}

void write_map_csv(std::ostream& out, const std::vector<MapEvaluation>& evals) {
  const Eigen::Index dq = evals.front().query.size();
  const Eigen::Index dt = evals.front().barycentric.size();
  for (Eigen::Index k = 0; k < dq; ++k) out << "x" << (k + 1) << ",";
  for (Eigen::Index k = 0; k < dt; ++k) out << "map" << (k + 1) << (k + 1 < dt ? "," : "\n");
  for (const MapEvaluation& e : evals) {
    for (Eigen::Index k = 0; k < dq; ++k) out << fmt(e.query[k]) << ",";
    for (Eigen::Index k = 0; k < dt; ++k)
      out << fmt(e.barycentric[k]) << (k + 1 < dt ? "," : "\n");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write file: " + path);
  return f;
}

}  // namespace

int cmd_divergence(const DivergenceArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const Eigen::MatrixXd x1 = load_points_csv(args.sample1_path);
        const Eigen::MatrixXd x2 = load_points_csv(args.sample2_path);
        const DiscreteMeasure m1 = DiscreteMeasure::from_samples(x1);
        const DiscreteMeasure m2 = DiscreteMeasure::from_samples(x2);
        const CostSpec cost = cost_by_name(args.solver.cost);
        const SinkhornConfig config = sinkhorn_config(args.solver);
        const DivergenceBundle b = sinkhorn_divergence(m1, m2, cost, config);

        nlohmann::json j;
        j["epsilon"] = config.epsilon;
        j["n1"] = static_cast<int>(x1.rows());
        j["n2"] = static_cast<int>(x2.rows());
        j["s12"] = b.s12;
        j["s11"] = b.s11;
        j["s22"] = b.s22;
        j["sbar"] = b.sbar;
        j["dual_sbar"] = sinkhorn_divergence_dual(b);
        const double sigma2 = asymptotic_variance(b);
        j["sigma2"] = sigma2;
        if (x1.rows() == x2.rows()) {
          const int n = static_cast<int>(x1.rows());
          const double hw = normal_quantile(1.0 - args.alpha / 2.0) *
                            std::sqrt(sigma2 / static_cast<double>(n));
          j["alpha"] = args.alpha;
          j["ci_lo"] = b.sbar - hw;
          j["ci_hi"] = b.sbar + hw;
          j["degenerate"] = sigma2 < 1e-12;
        }
        out << j.dump(2) << "\n";
      },
      err);
}

int cmd_map(const MapArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const DiscreteMeasure m1 = DiscreteMeasure::from_samples(load_points_csv(args.sample1_path));
        const DiscreteMeasure m2 = DiscreteMeasure::from_samples(load_points_csv(args.sample2_path));
        const CostSpec cost = cost_by_name(args.solver.cost);
        const EotSolution sol = solve_schrodinger(m1, m2, cost, sinkhorn_config(args.solver));
        const Eigen::MatrixXd grid = resolve_grid(args.grid_path, m1, m2);
        const std::vector<MapEvaluation> evals = entropic_map(sol, grid);
        if (args.output_path.empty()) {
          write_map_csv(out, evals);
        } else {
          std::ofstream f = open_output(args.output_path);
          write_map_csv(f, evals);
        }
      },
      err);
}

int cmd_band(const BandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const DiscreteMeasure m1 = DiscreteMeasure::from_samples(load_points_csv(args.sample1_path));
        const Eigen::MatrixXd x2 = load_points_csv(args.sample2_path);
        const CostSpec cost = cost_by_name(args.solver.cost);
        const Eigen::MatrixXd grid =
            resolve_grid(args.grid_path, m1, DiscreteMeasure::from_samples(x2));
        const ConfidenceBand band =
            map_confidence_band(m1, x2, args.coordinate, grid, args.alpha, args.replicates,
                                cost, sinkhorn_config(args.solver), args.seed);
        out << band.to_json() << "\n";
        if (!args.output_csv.empty()) {
          std::ofstream f = open_output(args.output_csv);
          band.write_csv(f);
        }
      },
      err);
}

int cmd_null_test(const NullTestArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const Eigen::MatrixXd x1 = load_points_csv(args.sample1_path);
        const Eigen::MatrixXd x2 = load_points_csv(args.sample2_path);
        int m = args.m;
        if (m <= 0) {
          if (!(args.m_fraction > 0.0 && args.m_fraction <= 0.5))
            throw std::invalid_argument("null-test: m fraction must be in (0, 0.5]");
          const int n = static_cast<int>(x1.rows());
          m = std::clamp(static_cast<int>(std::lround(args.m_fraction * n)), 2, n / 2);
        }
        const ResampleReport report =
            mn_bootstrap_null(x1, x2, m, args.replicates, cost_by_name(args.solver.cost),
                              sinkhorn_config(args.solver), args.seed);

        nlohmann::json j = nlohmann::json::parse(report.to_json());
        j.erase("replicates");
        const auto& rep = report.replicates;
        const auto below = std::lower_bound(rep.begin(), rep.end(), report.observed);
        const double ge = static_cast<double>(rep.end() - below);
        j["p_value"] = (1.0 + ge) / (1.0 + static_cast<double>(report.b()));
        j["critical_0.95"] = report.quantile(0.95);
        out << j.dump(2) << "\n";
        if (!args.replicates_csv.empty()) {
          std::ofstream f = open_output(args.replicates_csv);
          report.write_csv(f);
        }
      },
      err);
}

int cmd_independence(const IndependenceArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const Eigen::MatrixXd pairs = load_points_csv(args.pairs_path);
        if (args.dim_v < 1 || args.dim_v >= pairs.cols())
          throw std::invalid_argument(
              "independence: dim-v must leave at least one column for each of v and w");
        const PairedSample s(pairs.leftCols(args.dim_v),
                             pairs.rightCols(pairs.cols() - args.dim_v));
        const IndependenceResult res =
            independence_test(s, args.replicates, cost_by_name(args.solver.cost),
                              sinkhorn_config(args.solver), args.seed, args.cap);

        nlohmann::json j;
        j["n"] = res.n;
        j["b"] = res.calibration.b();
        j["d_n"] = res.d_n;
        j["scaled"] = res.scaled;
        j["p_value"] = res.p_value;
        j["seed"] = args.seed;
        out << j.dump(2) << "\n";
        if (!args.replicates_csv.empty()) {
          std::ofstream f = open_output(args.replicates_csv);
          res.calibration.write_csv(f);
        }
      },
      err);
}

ExperimentConfig load_experiment_config(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  ExperimentConfig c;
  if (j.contains("box")) {
    const auto& box = j.at("box");
    const std::vector<double> lo = box.at("lower").get<std::vector<double>>();
    const std::vector<double> hi = box.at("upper").get<std::vector<double>>();
    c.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    c.upper = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  }
  if (j.contains("n")) c.n = j.at("n").get<int>();
  if (j.contains("m_fractions")) c.m_fractions = j.at("m_fractions").get<std::vector<double>>();
  if (j.contains("outer_reps")) c.outer_reps = j.at("outer_reps").get<int>();
  if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
  if (j.contains("epsilon")) c.solver.epsilon = j.at("epsilon").get<double>();
  if (j.contains("tol")) c.solver.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) c.solver.max_iter = j.at("max_iter").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

int cmd_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        if (config.out_dir.empty())
          throw std::invalid_argument("experiment: output directory required");
        if (config.outer_reps < 1)
          throw std::invalid_argument("experiment: need outer_reps >= 1");
        if (config.m_fractions.empty())
          throw std::invalid_argument("experiment: need at least one m fraction");
        for (double f : config.m_fractions)
          if (!(f > 0.0 && f <= 0.5))
            throw std::invalid_argument("experiment: m fractions must be in (0, 0.5]");
        if (config.n < 4) throw std::invalid_argument("experiment: need n >= 4");

        const CostSpec cost = cost_by_name(config.solver.cost);
        const SinkhornConfig sconfig = sinkhorn_config(config.solver);
        const int d = static_cast<int>(config.lower.size());
        if (config.upper.size() != d || d < 1)
          throw std::invalid_argument("experiment: box bounds must have equal nonzero dimension");

        const int R = config.outer_reps;
        const int F = static_cast<int>(config.m_fractions.size());
        std::vector<int> ms(static_cast<std::size_t>(F));
        for (int f = 0; f < F; ++f)
          ms[static_cast<std::size_t>(f)] = std::clamp(
              static_cast<int>(std::lround(config.m_fractions[static_cast<std::size_t>(f)] *
                                           config.n)),
              2, config.n / 2);

        std::vector<double> observed(static_cast<std::size_t>(R));
        std::vector<std::vector<double>> ranks(
            static_cast<std::size_t>(F), std::vector<double>(static_cast<std::size_t>(R)));
        for (int r = 0; r < R; ++r) {
          Rng rng(config.seed + 2 * static_cast<std::uint64_t>(r));
          Eigen::MatrixXd x1(config.n, d), x2(config.n, d);
          for (int i = 0; i < config.n; ++i)
            for (int k = 0; k < d; ++k)
              x1(i, k) = rng.uniform(config.lower[k], config.upper[k]);
          for (int i = 0; i < config.n; ++i)
            for (int k = 0; k < d; ++k)
              x2(i, k) = rng.uniform(config.lower[k], config.upper[k]);

          const std::uint64_t boot_seed = config.seed + 2 * static_cast<std::uint64_t>(r) + 1;
          for (int f = 0; f < F; ++f) {
            const ResampleReport report =
                mn_bootstrap_null(x1, x2, ms[static_cast<std::size_t>(f)], config.replicates,
                                  cost, sconfig, boot_seed);
            if (f == 0) observed[static_cast<std::size_t>(r)] = report.observed;
            ranks[static_cast<std::size_t>(f)][static_cast<std::size_t>(r)] =
                report.rank_of_observed();
          }
        }

        std::filesystem::create_directories(config.out_dir);
        const std::filesystem::path dir(config.out_dir);

        {
          std::ofstream f = open_output((dir / "statistics.csv").string());
          f << "rep,n_sbar";
          for (double frac : config.m_fractions) f << ",rank_m" << fraction_label(frac);
          f << "\n";
          for (int r = 0; r < R; ++r) {
            f << r << "," << fmt(observed[static_cast<std::size_t>(r)]);
            for (int k = 0; k < F; ++k)
              f << "," << fmt(ranks[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)]);
            f << "\n";
          }
        }

        {
          const double top = *std::max_element(observed.begin(), observed.end());
          const int bins = 40;
          const double width = top > 0.0 ? top / bins : 1.0;
          std::vector<int> counts(bins, 0);
          for (double v : observed) {
            int idx = static_cast<int>(v / width);
            counts[static_cast<std::size_t>(std::clamp(idx, 0, bins - 1))] += 1;
          }
          std::ofstream f = open_output((dir / "histogram.csv").string());
          f << "bin_left,bin_right,count\n";
          for (int k = 0; k < bins; ++k)
            f << fmt(k * width) << "," << fmt((k + 1) * width) << ","
              << counts[static_cast<std::size_t>(k)] << "\n";
        }

        std::vector<std::vector<double>> sorted_ranks = ranks;
        for (auto& v : sorted_ranks) std::sort(v.begin(), v.end());
        {
          std::ofstream f = open_output((dir / "ppdata.csv").string());
          f << "u";
          for (double frac : config.m_fractions) f << ",rank_m" << fraction_label(frac);
          f << "\n";
          for (int r = 0; r < R; ++r) {
            f << fmt((r + 1.0) / R);
            for (int k = 0; k < F; ++k)
              f << ","
                << fmt(sorted_ranks[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)]);
            f << "\n";
          }
        }

        nlohmann::json effective;
        effective["box"]["lower"] = std::vector<double>(config.lower.data(),
                                                        config.lower.data() + d);
        effective["box"]["upper"] = std::vector<double>(config.upper.data(),
                                                        config.upper.data() + d);
        effective["n"] = config.n;
        effective["m_fractions"] = config.m_fractions;
        effective["m_values"] = ms;
        effective["outer_reps"] = R;
        effective["replicates"] = config.replicates;
        effective["epsilon"] = config.solver.epsilon;
        effective["tol"] = config.solver.tol;
        effective["max_iter"] = config.solver.max_iter;
        effective["seed"] = config.seed;
        {
          std::ofstream f = open_output((dir / "config.json").string());
          f << effective.dump(2) << "\n";
        }

        nlohmann::json summary;
        summary["out_dir"] = config.out_dir;
        summary["outer_reps"] = R;
        summary["n"] = config.n;
        for (int k = 0; k < F; ++k)
          summary["ks_to_uniform"]["m" + fraction_label(
              config.m_fractions[static_cast<std::size_t>(k)])] =
              ks_uniform_distance(ranks[static_cast<std::size_t>(k)]);
        out << summary.dump(2) << "\n";
      },
      err);
}

}  // namespace entropic::cli
