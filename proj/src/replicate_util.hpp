#pragma once

#include <string>
#include <vector>

#include "entropic/errors.hpp"
#include "entropic/threads.hpp"

namespace entropic::detail {

// Runs one replicate closure per index in parallel, collecting values by
// index; the lowest-index failure is rethrown with its replicate number.
template <typename F>
std::vector<double> run_replicates(int B, F&& replicate) {
  std::vector<double> values(static_cast<std::size_t>(B));
  std::vector<std::string> errors(static_cast<std::size_t>(B));
  std::vector<char> failed(static_cast<std::size_t>(B), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads::max_threads())
#endif
  for (int b = 0; b < B; ++b) {
    try {
      values[static_cast<std::size_t>(b)] = replicate(b);
    } catch (const std::exception& e) {
      failed[static_cast<std::size_t>(b)] = 1;
      errors[static_cast<std::size_t>(b)] = e.what();
    }
  }
  for (int b = 0; b < B; ++b) {
    if (failed[static_cast<std::size_t>(b)])
      throw SolverError(
          "replicate " + std::to_string(b) + ": " + errors[static_cast<std::size_t>(b)], 0, 0.0);
  }
  return values;
}

}  // namespace entropic::detail
