#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace genremap {

struct OptimizeOptions {
  double grad_tolerance = 1e-6;  // on the Euclidean gradient norm
  int max_iterations = 5000;
  int history = 10;
};

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
};

// Returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Deterministic limited-memory BFGS with Armijo backtracking. Every accepted
// step decreases f, so the result is never worse than the starting point.
OptimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const OptimizeOptions& options = {});

}  // namespace genremap
