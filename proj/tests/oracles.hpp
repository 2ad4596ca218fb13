#pragma once

// Slow, direct reference implementations used only by the tests. Nothing
// here calls into the library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// U counted pair by pair: a > b scores 1, a == b scores one half.
inline double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

// Mid-rank of each pooled value by counting smaller and equal values.
inline std::vector<double> midranks(const std::vector<double>& pooled) {
  std::vector<double> r;
  for (double x : pooled) {
    double below = 0.0, equal = 0.0;
    for (double y : pooled) {
      below += y < x;
      equal += y == x;
    }
    r.push_back(below + (equal + 1.0) / 2.0);
  }
  return r;
}

struct RankSum {
  double u = 0.0;
  double z = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

// Exact permutation moments of U: every way of choosing which nA of the
// pooled mid-ranks belong to group A is enumerated. The normal
// approximation then uses these moments with a half-unit continuity
// correction. Feasible for pooled sizes up to about 16.
inline RankSum rank_sum_by_enumeration(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);
  const std::size_t n = pooled.size(), na = a.size();
  const double offset = static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;

  double observed = 0.0;
  for (std::size_t i = 0; i < na; ++i) observed += ranks[i];

  double count = 0.0, sum = 0.0, sumsq = 0.0;
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(na), 1);
  std::sort(pick.begin(), pick.end());
  do {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) r += ranks[i];
    const double u = r - offset;
    count += 1.0;
    sum += u;
    sumsq += u * u;
  } while (std::next_permutation(pick.begin(), pick.end()));

  RankSum out;
  out.u = observed - offset;
  out.mean = sum / count;
  out.variance = sumsq / count - out.mean * out.mean;
  if (out.variance <= 1e-12) return out;
  const double dev = out.u - out.mean;
  const double corrected = std::max(0.0, std::fabs(dev) - 0.5);
  out.z = (dev < 0 ? -corrected : corrected) / std::sqrt(out.variance);
  return out;
}

// Multinomial naive Bayes posteriors by Bayes' rule on plain products.
// Parameters are counted from the examples; counts should be small.
inline std::vector<double> bayes_posteriors(const std::vector<std::vector<double>>& counts,
                                            const std::vector<std::string>& labels,
                                            const std::vector<std::string>& classes, double alpha,
                                            const std::vector<double>& x) {
  const std::size_t f = x.size();
  std::vector<double> joint;
  for (const auto& c : classes) {
    double docs = 0.0, total = 0.0;
    std::vector<double> per(f, 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (labels[i] != c) continue;
      docs += 1.0;
      for (std::size_t j = 0; j < f; ++j) {
        per[j] += counts[i][j];
        total += counts[i][j];
      }
    }
    double p = docs / static_cast<double>(counts.size());
    for (std::size_t j = 0; j < f; ++j) {
      const double theta = (per[j] + alpha) / (total + alpha * static_cast<double>(f));
      p *= std::pow(theta, x[j]);
    }
    joint.push_back(p);
  }
  double z = 0.0;
  for (double p : joint) z += p;
  for (double& p : joint) p /= z;
  return joint;
}

// Score of one explicit state path, from plain probabilities.
inline double path_score(const std::vector<double>& initial,
                         const std::vector<std::vector<double>>& transitions,
                         const std::vector<std::vector<double>>& log_emissions,
                         const std::vector<std::size_t>& path) {
  double s = std::log(initial[path[0]]) + log_emissions[0][path[0]];
  for (std::size_t t = 1; t < path.size(); ++t)
    s += std::log(transitions[path[t - 1]][path[t]]) + log_emissions[t][path[t]];
  return s;
}

// Best score over all S^T state paths, and every path attaining it within tol.
inline std::pair<double, std::vector<std::vector<std::size_t>>> exhaustive_best_paths(
    const std::vector<double>& initial, const std::vector<std::vector<double>>& transitions,
    const std::vector<std::vector<double>>& log_emissions, double tol = 1e-9) {
  const std::size_t s = initial.size(), t = log_emissions.size();
  std::vector<std::size_t> path(t, 0);
  std::vector<std::pair<double, std::vector<std::size_t>>> all;
  for (;;) {
    all.emplace_back(path_score(initial, transitions, log_emissions, path), path);
    std::size_t k = 0;
    while (k < t && ++path[k] == s) path[k++] = 0;
    if (k == t) break;
  }
  double best = -INFINITY;
  for (const auto& [score, _] : all) best = std::max(best, score);
  std::vector<std::vector<std::size_t>> winners;
  for (const auto& [score, p] : all)
    if (score >= best - tol) winners.push_back(p);
  return {best, winners};
}

// Feature counts over a token stream, sorted by count then id.
inline std::vector<std::string> top_by_count(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::string, long> counts;
  for (const auto& t : tokens) ++counts[t];
  std::vector<std::pair<std::string, long>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < items.size() && i < n; ++i) out.push_back(items[i].first);
  return out;
}

// Textbook two-pass Pearson r.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Precision, recall and F1 of one class read straight off the matrix
// (rows actual, columns predicted).
struct Prf {
  double precision, recall, f1;
};

inline Prf class_prf(const std::vector<std::vector<std::size_t>>& m, std::size_t c) {
  double tp = static_cast<double>(m[c][c]), fp = 0.0, fn = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k == c) continue;
    fp += static_cast<double>(m[k][c]);
    fn += static_cast<double>(m[c][k]);
  }
  const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  return {p, r, p + r > 0 ? 2 * p * r / (p + r) : 0.0};
}

// Central finite-difference gradient.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
