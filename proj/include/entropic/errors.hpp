#pragma once

#include <stdexcept>
#include <string>

namespace entropic {

// Thrown when an iterative solve fails (iteration cap hit, non-finite values).
// Input validation problems use std::invalid_argument instead.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& msg, int iterations, double violation)
      : std::runtime_error(msg), iterations_(iterations), violation_(violation) {}

  int iterations() const { return iterations_; }
  double violation() const { return violation_; }

 private:
  int iterations_;
  double violation_;
};

}  // namespace entropic
