#include <algorithm>
#include <cmath>
#include <set>

#include "genremap/classify.hpp"
#include "genremap/error.hpp"
#include "genremap/rng.hpp"

namespace genremap {
namespace {

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

const GenreId kRest = "~rest";

}  // namespace

std::size_t NaiveBayesModel::class_index(const GenreId& c) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == c) return i;
  throw Error("class not in naive Bayes model: " + c);
}

std::vector<double> NaiveBayesModel::joint_log_scores(std::span<const double> counts) const {
  if (counts.size() != feature_count())
    throw Error("dimension mismatch: model has " + std::to_string(feature_count()) +
                " features, input has " + std::to_string(counts.size()));
  std::vector<double> scores = log_priors;
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t f = 0; f < counts.size(); ++f)
      if (counts[f] != 0.0) scores[c] += counts[f] * log_likelihoods[c][f];
  return scores;
}

std::vector<double> NaiveBayesModel::log_posteriors(std::span<const double> counts) const {
  std::vector<double> scores = joint_log_scores(counts);
  const double z = log_sum_exp(scores);
  for (double& s : scores) s -= z;
  return scores;
}

NaiveBayesModel train_naive_bayes(const std::vector<CountExample>& examples, double alpha,
                                  std::vector<std::string> feature_names) {
  if (!(alpha > 0.0)) throw Error("naive Bayes smoothing alpha must be positive");
  if (examples.empty()) throw Error("naive Bayes needs training examples");
  const std::size_t n_features = examples.front().counts.size();
  if (!feature_names.empty() && feature_names.size() != n_features)
    throw Error("feature name count does not match count vectors");

  std::set<GenreId> class_set;
  for (const auto& ex : examples) {
    if (ex.counts.size() != n_features) throw Error("count vectors differ in length");
    class_set.insert(ex.label);
  }
  if (class_set.size() < 2) throw Error("naive Bayes needs at least two classes");

  NaiveBayesModel m;
  m.alpha = alpha;
  m.classes.assign(class_set.begin(), class_set.end());
  m.feature_names = std::move(feature_names);
  std::vector<double> docs(m.classes.size(), 0.0);
  std::vector<std::vector<double>> counts(m.classes.size(), std::vector<double>(n_features, 0.0));
  for (const auto& ex : examples) {
    const std::size_t c = m.class_index(ex.label);
    docs[c] += 1.0;
    for (std::size_t f = 0; f < n_features; ++f) {
      if (!(ex.counts[f] >= 0.0) || !std::isfinite(ex.counts[f]))
        throw Error("naive Bayes counts must be finite and non-negative");
      counts[c][f] += ex.counts[f];
    }
  }

  const double n_docs = static_cast<double>(examples.size());
  m.log_priors.resize(m.classes.size());
  m.log_likelihoods.assign(m.classes.size(), std::vector<double>(n_features));
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    m.log_priors[c] = std::log(docs[c] / n_docs);
    double total = 0.0;
    for (double x : counts[c]) total += x;
    const double denom = std::log(total + alpha * static_cast<double>(n_features));
    for (std::size_t f = 0; f < n_features; ++f)
      m.log_likelihoods[c][f] = std::log(counts[c][f] + alpha) - denom;
  }
  return m;
}

// ---------------------------------------------------------------------------

double CalibrationMap::operator()(double score) const { return sigmoid(a * score + b); }

namespace {

double calibration_loss(std::span<const double> s, std::span<const int> y, double a, double b,
                        double ridge, double* ga, double* gb) {
  double loss = 0.0;
  double da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double z = a * s[i] + b;
    // -log p for y=1 is softplus(-z); -log(1-p) for y=0 is softplus(z).
    loss += y[i] ? softplus(-z) : softplus(z);
    const double r = sigmoid(z) - static_cast<double>(y[i]);
    da += r * s[i];
    db += r;
  }
  loss += 0.5 * ridge * (a * a + b * b);
  if (ga) *ga = da + ridge * a;
  if (gb) *gb = db + ridge * b;
  return loss;
}

}  // namespace

CalibrationMap calibrate(std::span<const double> raw_scores, std::span<const int> labels) {
  if (raw_scores.size() != labels.size()) throw Error("calibration scores and labels differ in length");
  double max_pos = -INFINITY, min_pos = INFINITY, max_neg = -INFINITY, min_neg = INFINITY;
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < raw_scores.size(); ++i) {
    const double s = raw_scores[i];
    if (!std::isfinite(s)) throw Error("calibration scores must be finite");
    if (labels[i]) {
      has_pos = true;
      max_pos = std::max(max_pos, s);
      min_pos = std::min(min_pos, s);
    } else {
      has_neg = true;
      max_neg = std::max(max_neg, s);
      min_neg = std::min(min_neg, s);
    }
  }
  if (!has_pos || !has_neg) throw Error("calibration needs both labels present");

  CalibrationMap map;
  map.separable = max_neg < min_pos || max_pos < min_neg;
  const double ridge = map.separable ? kSeparableRidge : 0.0;

  auto full = [&](std::span<const double> x, std::span<double> g) {
    return calibration_loss(raw_scores, labels, x[0], x[1], ridge, &g[0], &g[1]);
  };
  OptimizeResult fit = minimize(full, {0.0, 0.0});
  map.a = fit.x[0];
  map.b = fit.x[1];
  if (map.a < kMinCalibrationSlope) {
    // Scores carry no usable ordering signal; pin the slope and refit b.
    map.a = kMinCalibrationSlope;
    auto intercept_only = [&](std::span<const double> x, std::span<double> g) {
      return calibration_loss(raw_scores, labels, kMinCalibrationSlope, x[0], ridge, nullptr, &g[0]);
    };
    map.b = minimize(intercept_only, {0.0}).x[0];
  }
  return map;
}

double CalibratedNaiveBayes::raw_score(std::span<const double> counts) const {
  const auto lp = nb.log_posteriors(counts);
  const std::size_t pos = nb.class_index(positive);
  const std::size_t rest = pos == 0 ? 1 : 0;
  return lp[pos] - lp[rest];
}

double CalibratedNaiveBayes::predict_proba(std::span<const double> counts) const {
  return calibration(raw_score(counts));
}

CalibratedNaiveBayes train_calibrated_naive_bayes(const std::vector<CountExample>& examples,
                                                  const GenreId& positive, double alpha,
                                                  std::uint64_t seed,
                                                  std::vector<std::string> feature_names,
                                                  int calibration_folds) {
  std::vector<CountExample> binary;
  binary.reserve(examples.size());
  std::vector<std::size_t> pos_idx, neg_idx;
  for (const auto& ex : examples) {
    const bool is_pos = ex.label == positive;
    (is_pos ? pos_idx : neg_idx).push_back(binary.size());
    binary.push_back({ex.counts, is_pos ? positive : kRest});
  }
  if (pos_idx.empty() || neg_idx.empty())
    throw Error("naive Bayes needs at least two classes");

  CalibratedNaiveBayes model;
  model.positive = positive;
  model.nb = train_naive_bayes(binary, alpha, feature_names);

  const int folds = static_cast<int>(
      std::min<std::size_t>({static_cast<std::size_t>(std::max(1, calibration_folds)),
                             pos_idx.size(), neg_idx.size()}));
  std::vector<double> scores(binary.size());
  std::vector<int> labels(binary.size());
  for (std::size_t i = 0; i < binary.size(); ++i) labels[i] = binary[i].label == positive;

  if (folds < 2) {
    for (std::size_t i = 0; i < binary.size(); ++i) scores[i] = model.raw_score(binary[i].counts);
  } else {
    Rng rng(seed);
    rng.shuffle(pos_idx);
    rng.shuffle(neg_idx);
    std::vector<int> fold_of(binary.size());
    for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_of[pos_idx[i]] = static_cast<int>(i) % folds;
    for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_of[neg_idx[i]] = static_cast<int>(i) % folds;
    for (int f = 0; f < folds; ++f) {
      std::vector<CountExample> train;
      for (std::size_t i = 0; i < binary.size(); ++i)
        if (fold_of[i] != f) train.push_back(binary[i]);
      CalibratedNaiveBayes inner;
      inner.positive = positive;
      inner.nb = train_naive_bayes(train, alpha);
      for (std::size_t i = 0; i < binary.size(); ++i)
        if (fold_of[i] == f) scores[i] = inner.raw_score(binary[i].counts);
    }
  }
  model.calibration = calibrate(scores, labels);
  return model;
}

}  // namespace genremap
