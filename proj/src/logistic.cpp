#include <cmath>
#include <numeric>

#include "genremap/classify.hpp"
#include "genremap/error.hpp"

namespace genremap {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double logistic_loss(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                     std::span<const double> weights, double bias, double lambda,
                     std::vector<double>* grad_weights, double* grad_bias) {
  const std::size_t d = weights.size();
  if (grad_weights) grad_weights->assign(d, 0.0);
  double gb = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& x = rows[i];
    const double z = std::inner_product(x.begin(), x.end(), weights.begin(), bias);
    loss += labels[i] ? softplus(-z) : softplus(z);
    const double r = sigmoid(z) - static_cast<double>(labels[i]);
    gb += r;
    if (grad_weights)
      for (std::size_t j = 0; j < d; ++j) (*grad_weights)[j] += r * x[j];
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    sq += weights[j] * weights[j];
    if (grad_weights) (*grad_weights)[j] += lambda * weights[j];
  }
  if (grad_bias) *grad_bias = gb;
  return loss + 0.5 * lambda * sq;
}

LogisticModel train_logistic(const std::vector<std::vector<double>>& rows,
                             std::span<const int> labels, double lambda,
                             std::vector<std::string> feature_names,
                             const OptimizeOptions& options) {
  if (rows.empty() || rows.size() != labels.size())
    throw Error("logistic regression needs one label per non-empty row");
  if (!(lambda >= 0.0)) throw Error("lambda must be non-negative");
  const std::size_t d = rows.front().size();
  if (!feature_names.empty() && feature_names.size() != d)
    throw Error("feature name count does not match row width");
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw Error("logistic regression needs both labels present");

  LogisticModel m;
  m.lambda = lambda;
  m.feature_names = std::move(feature_names);
  m.means.assign(d, 0.0);
  m.scales.assign(d, 1.0);
  const double n = static_cast<double>(rows.size());
  for (const auto& x : rows) {
    if (x.size() != d) throw Error("rows differ in width");
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(x[j])) throw Error("non-finite feature value");
      m.means[j] += x[j] / n;
    }
  }
  std::vector<double> var(d, 0.0);
  for (const auto& x : rows)
    for (std::size_t j = 0; j < d; ++j) var[j] += (x[j] - m.means[j]) * (x[j] - m.means[j]) / n;
  for (std::size_t j = 0; j < d; ++j) m.scales[j] = var[j] > 0.0 ? std::sqrt(var[j]) : 1.0;

  std::vector<std::vector<double>> z(rows.size(), std::vector<double>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) z[i][j] = (rows[i][j] - m.means[j]) / m.scales[j];

  std::vector<double> gw;
  auto objective = [&](std::span<const double> p, std::span<double> g) {
    double gb = 0.0;
    const double loss = logistic_loss(z, labels, p.first(d), p[d], lambda, &gw, &gb);
    std::copy(gw.begin(), gw.end(), g.begin());
    g[d] = gb;
    return loss;
  };
  OptimizeResult fit = minimize(objective, std::vector<double>(d + 1, 0.0), options);
  m.weights.assign(fit.x.begin(), fit.x.begin() + static_cast<long>(d));
  m.bias = fit.x[d];
  m.converged = fit.converged;
  m.iterations = fit.iterations;
  return m;
}

double LogisticModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size())
    throw Error("dimension mismatch: model has " + std::to_string(weights.size()) +
                " features, input has " + std::to_string(x.size()));
  double z = bias;
  for (std::size_t j = 0; j < x.size(); ++j) z += weights[j] * (x[j] - means[j]) / scales[j];
  return z;
}

double LogisticModel::predict_proba(std::span<const double> x) const { return sigmoid(decision(x)); }

}  // namespace genremap
