#pragma once

namespace entropic::threads {

// Number of threads parallel regions may use. Respects the ENTROPIC_THREADS
// environment variable (positive integer, capped at 1024, reread on every
// call); otherwise the OpenMP default. Returns 1 when OpenMP is not compiled
// in.
int max_threads();

// Test hook: force a thread count (<= 0 restores the environment default).
void set_max_threads(int n);

}  // namespace entropic::threads
