#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "entropic/kernels.hpp"
#include "entropic/measures.hpp"
#include "entropic/rng.hpp"
#include "entropic/sinkhorn.hpp"
#include "entropic/threads.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(int reps, const std::function<void()>& body) {
  body();  // warm up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) body();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void bench_softmin(int k) {
  entropic::Rng rng(12345);
  std::vector<double> Cs(static_cast<std::size_t>(k) * k), shift(static_cast<std::size_t>(k)),
      out(static_cast<std::size_t>(k));
  for (double& v : Cs) v = rng.uniform(0.0, 8.0);
  for (double& v : shift) v = rng.uniform(-1.0, 1.0);

  const int reps = k <= 1024 ? 20 : 5;
  const double rows_serial = time_ms(
      reps, [&] { entropic::kernels::softmin_rows_serial(Cs.data(), k, k, shift.data(), 1.0, out.data()); });
  const double rows_parallel = time_ms(
      reps, [&] { entropic::kernels::softmin_rows_parallel(Cs.data(), k, k, shift.data(), 1.0, out.data()); });
  const double cols_serial = time_ms(
      reps, [&] { entropic::kernels::softmin_cols_serial(Cs.data(), k, k, shift.data(), 1.0, out.data()); });
  const double cols_parallel = time_ms(
      reps, [&] { entropic::kernels::softmin_cols_parallel(Cs.data(), k, k, shift.data(), 1.0, out.data()); });

  std::printf("softmin %5d x %-5d rows  serial %9.3f ms  parallel %9.3f ms  speedup %.2fx\n",
              k, k, rows_serial, rows_parallel, rows_serial / rows_parallel);
  std::printf("softmin %5d x %-5d cols  serial %9.3f ms  parallel %9.3f ms  speedup %.2fx\n",
              k, k, cols_serial, cols_parallel, cols_serial / cols_parallel);
}

void bench_solve(int k) {
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);
  const auto m1 = entropic::DiscreteMeasure::from_samples(
      entropic::sample_uniform_box(lo, hi, k, 1));
  const auto m2 = entropic::DiscreteMeasure::from_samples(
      entropic::sample_uniform_box(lo, hi, k, 2));
  entropic::SinkhornConfig config;
  config.epsilon = 0.5;
  config.tol = 1e-8;
  const auto cost = entropic::quadratic_cost();

  entropic::kernels::set_execution(entropic::kernels::Execution::Serial);
  const double serial = time_ms(1, [&] { entropic::solve_schrodinger(m1, m2, cost, config); });
  entropic::kernels::set_execution(entropic::kernels::Execution::Parallel);
  const double parallel = time_ms(1, [&] { entropic::solve_schrodinger(m1, m2, cost, config); });
  entropic::kernels::set_execution(entropic::kernels::Execution::Auto);

  std::printf("solve   %5d x %-5d       serial %9.3f ms  parallel %9.3f ms  speedup %.2fx\n",
              k, k, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", entropic::threads::max_threads());
  for (int k : {256, 512, 1024, 2048}) bench_softmin(k);
  for (int k : {512, 1024}) bench_solve(k);
  return 0;
}
