#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "genremap/corpus.hpp"
#include "genremap/optimize.hpp"

namespace genremap {

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

struct CountExample {
  std::vector<double> counts;
  GenreId label;
};

struct NaiveBayesModel {
  std::vector<GenreId> classes;
  std::vector<double> log_priors;
  std::vector<std::vector<double>> log_likelihoods;  // class x feature
  double alpha = 1.0;
  std::vector<std::string> feature_names;

  std::size_t feature_count() const { return log_likelihoods.empty() ? 0 : log_likelihoods[0].size(); }
  std::size_t class_index(const GenreId& c) const;
  // log P(c) + sum_f counts[f] * log P(f | c), unnormalized.
  std::vector<double> joint_log_scores(std::span<const double> counts) const;
  // Normalized log P(c | counts).
  std::vector<double> log_posteriors(std::span<const double> counts) const;
};

// Laplace-smoothed multinomial model; priors from class frequencies.
NaiveBayesModel train_naive_bayes(const std::vector<CountExample>& examples, double alpha,
                                  std::vector<std::string> feature_names = {});

// ---------------------------------------------------------------------------
// Calibration: p = 1 / (1 + exp(-(a*s + b))) over a raw log-odds score s.

struct CalibrationMap {
  double a = 1.0;
  double b = 0.0;
  bool separable = false;  // labels separable; fitted with a small ridge

  double operator()(double score) const;
};

// Platt-style fit by maximum Bernoulli likelihood. The slope is clamped
// to at least kMinCalibrationSlope.
CalibrationMap calibrate(std::span<const double> raw_scores, std::span<const int> labels);

inline constexpr double kMinCalibrationSlope = 1e-6;
inline constexpr double kSeparableRidge = 1e-6;

// Naive Bayes used as a binary classifier for one class against the rest.
struct CalibratedNaiveBayes {
  NaiveBayesModel nb;
  GenreId positive;
  CalibrationMap calibration;

  // log P(positive | x) - log P(not positive | x)
  double raw_score(std::span<const double> counts) const;
  double predict_proba(std::span<const double> counts) const;
};

// Trains on all examples; the calibration map is fit on out-of-fold scores
// from a stratified internal split (`calibration_folds`, default 5).
CalibratedNaiveBayes train_calibrated_naive_bayes(const std::vector<CountExample>& examples,
                                                  const GenreId& positive, double alpha,
                                                  std::uint64_t seed,
                                                  std::vector<std::string> feature_names = {},
                                                  int calibration_folds = 5);

// ---------------------------------------------------------------------------
// L2-regularized logistic regression

struct LogisticModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;  // on standardized features
  double bias = 0.0;
  double lambda = 0.0;
  std::vector<double> means;   // standardization applied before the weights
  std::vector<double> scales;
  bool converged = true;
  int iterations = 0;

  double decision(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;
};

// L(w, b) = -sum[y log p + (1-y) log(1-p)] + lambda/2 |w|^2 with
// p = sigmoid(w.x + b). Writes the gradient when the pointers are non-null.
double logistic_loss(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                     std::span<const double> weights, double bias, double lambda,
                     std::vector<double>* grad_weights = nullptr, double* grad_bias = nullptr);

// Standardizes features, then minimizes the regularized loss from w = 0.
LogisticModel train_logistic(const std::vector<std::vector<double>>& rows,
                             std::span<const int> labels, double lambda,
                             std::vector<std::string> feature_names = {},
                             const OptimizeOptions& options = {});

double sigmoid(double x);

// ---------------------------------------------------------------------------
// Binary classifiers over feature vectors and the one-vs-all bank

using BinaryModel = std::variant<LogisticModel, CalibratedNaiveBayes>;

// Logistic models read FeatureVector::dense(); naive Bayes reads word counts.
double predict_proba(const LogisticModel& model, const FeatureVector& fv);
double predict_proba(const CalibratedNaiveBayes& model, const FeatureVector& fv);
double predict_proba(const BinaryModel& model, const FeatureVector& fv);

// Vocabulary the model expects feature vectors to be extracted with.
Vocabulary model_vocabulary(const BinaryModel& model);

// Zero-weight logistic model predicting a fixed probability.
LogisticModel constant_model(std::vector<std::string> feature_names, double probability);

enum class ClassifierKind { kLogistic, kNaiveBayes };
ClassifierKind parse_classifier_kind(const std::string& name);

struct BankOptions {
  ClassifierKind kind = ClassifierKind::kLogistic;
  double lambda = 1.0;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct GenreClassifierBank {
  GenreTaxonomy taxonomy;
  Vocabulary vocab;
  std::vector<BinaryModel> classifiers;  // one per taxonomy leaf, same order
};

// One binary classifier per taxonomy leaf. Leaves without positive (or
// without negative) training pages get a constant model at the smoothed
// training rate (count + 0.5) / (n + 1).
GenreClassifierBank train_bank(std::span<const FeatureVector> pages,
                               std::span<const GenreId> labels, const GenreTaxonomy& taxonomy,
                               const Vocabulary& vocab, const BankOptions& options);

struct PageDecision {
  GenreId leaf;
  GenreId superclass;
  std::map<GenreId, double> posteriors;
};

// Highest-probability leaf wins (smaller id on exact ties); probabilities
// are not renormalized across leaves.
PageDecision classify_page_one_vs_all(const GenreClassifierBank& bank, const FeatureVector& fv);

}  // namespace genremap
