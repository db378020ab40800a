#include "entropic/threads.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace entropic::threads {

namespace {

int env_threads() {
  const char* s = std::getenv("ENTROPIC_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1) return 0;
  if (v > 1024) v = 1024;
  return static_cast<int>(v);
}

std::atomic<int> forced{0};

}  // namespace

int max_threads() {
  int f = forced.load(std::memory_order_relaxed);
  if (f > 0) return f;
  const int from_env = env_threads();
  if (from_env > 0) return from_env;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) { forced.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace entropic::threads
