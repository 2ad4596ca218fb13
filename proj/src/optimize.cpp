#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "genremap/optimize.hpp"

namespace genremap {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

OptimizeResult minimize(const Objective& f, std::vector<double> x0, const OptimizeOptions& options) {
  const std::size_t n = x0.size();
  OptimizeResult res;
  res.x = std::move(x0);
  std::vector<double> grad(n), next_grad(n), dir(n), next_x(n), alpha_buf;
  res.value = f(res.x, grad);
  res.grad_norm = norm(grad);

  std::deque<Correction> memory;
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (res.grad_norm <= options.grad_tolerance) {
      res.converged = true;
      res.status = "converged";
      return res;
    }

    // Two-loop recursion for the quasi-Newton direction.
    dir = grad;
    alpha_buf.assign(memory.size(), 0.0);
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha_buf[k] = memory[k].rho * dot(memory[k].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha_buf[k] * memory[k].y[i];
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& d : dir) d *= gamma;
    } else {
      const double scale = 1.0 / std::max(1.0, res.grad_norm);
      for (double& d : dir) d *= scale;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha_buf[k] - beta) * memory[k].s[i];
    }
    for (double& d : dir) d = -d;

    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      // Not a descent direction; fall back to scaled steepest descent.
      memory.clear();
      const double scale = 1.0 / std::max(1.0, res.grad_norm);
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i] * scale;
      slope = dot(grad, dir);
    }

    // Armijo sufficient decrease, or the approximate Wolfe test, which
    // judges progress by the directional derivative once the change in f is
    // below floating-point resolution.
    const double f_noise = 1e-10 * std::max(1.0, std::fabs(res.value));
    double step = 1.0;
    double next_value = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n; ++i) next_x[i] = res.x[i] + step * dir[i];
      next_value = f(next_x, next_grad);
      if (!std::isfinite(next_value)) {
        step *= 0.5;
        continue;
      }
      if (next_value < res.value && next_value <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      const double next_slope = dot(next_grad, dir);
      if (next_value <= res.value + f_noise && next_slope >= 0.9 * slope &&
          next_slope <= -0.9998 * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      res.status = "line search stalled";
      return res;
    }

    Correction c{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      c.s[i] = next_x[i] - res.x[i];
      c.y[i] = next_grad[i] - grad[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-12 * norm(c.s) * norm(c.y)) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
    }

    res.x.swap(next_x);
    grad.swap(next_grad);
    res.value = next_value;
    res.grad_norm = norm(grad);
  }
  res.converged = res.grad_norm <= options.grad_tolerance;
  res.status = res.converged ? "converged" : "iteration limit";
  return res;
}

}  // namespace genremap
