#include <cmath>

#include "genremap/classify.hpp"
#include "genremap/error.hpp"
#include "genremap/parallel.hpp"
#include "genremap/rng.hpp"

namespace genremap {

double predict_proba(const LogisticModel& model, const FeatureVector& fv) {
  return model.predict_proba(fv.dense());
}

double predict_proba(const CalibratedNaiveBayes& model, const FeatureVector& fv) {
  return model.predict_proba(fv.word_counts());
}

double predict_proba(const BinaryModel& model, const FeatureVector& fv) {
  return std::visit([&](const auto& m) { return predict_proba(m, fv); }, model);
}

Vocabulary model_vocabulary(const BinaryModel& model) {
  if (const auto* lr = std::get_if<LogisticModel>(&model))
    return vocabulary_from_dense_names(lr->feature_names);
  return Vocabulary(std::get<CalibratedNaiveBayes>(model).nb.feature_names);
}

LogisticModel constant_model(std::vector<std::string> feature_names, double probability) {
  LogisticModel m;
  const std::size_t d = feature_names.size();
  m.feature_names = std::move(feature_names);
  m.weights.assign(d, 0.0);
  m.means.assign(d, 0.0);
  m.scales.assign(d, 1.0);
  m.bias = std::log(probability / (1.0 - probability));
  return m;
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "logistic") return ClassifierKind::kLogistic;
  if (name == "naive_bayes") return ClassifierKind::kNaiveBayes;
  throw Error("unknown classifier kind: " + name + " (expected logistic or naive_bayes)");
}

GenreClassifierBank train_bank(std::span<const FeatureVector> pages,
                               std::span<const GenreId> labels, const GenreTaxonomy& taxonomy,
                               const Vocabulary& vocab, const BankOptions& options) {
  if (pages.size() != labels.size()) throw Error("one label per training page required");
  if (pages.empty()) throw Error("no training pages");
  for (const auto& g : labels)
    if (!taxonomy.contains(g)) throw Error("unknown genre: " + g);

  GenreClassifierBank bank;
  bank.taxonomy = taxonomy;
  bank.vocab = vocab;
  const auto names = dense_feature_names(vocab);

  std::vector<std::vector<double>> dense;
  std::vector<CountExample> counts;
  if (options.kind == ClassifierKind::kLogistic) {
    dense.reserve(pages.size());
    for (const auto& fv : pages) dense.push_back(fv.dense());
  } else {
    counts.reserve(pages.size());
    for (std::size_t i = 0; i < pages.size(); ++i) counts.push_back({pages[i].word_counts(), labels[i]});
  }

  const auto& leaves = taxonomy.leaves();
  bank.classifiers.resize(leaves.size(), LogisticModel{});
  parallel_for(leaves.size(), options.jobs, [&](std::size_t li) {
    const GenreId& leaf = leaves[li];
    std::vector<int> y(labels.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) positives += (y[i] = labels[i] == leaf);
    if (positives == 0 || positives == labels.size()) {
      const double rate = (static_cast<double>(positives) + 0.5) / (static_cast<double>(labels.size()) + 1.0);
      bank.classifiers[li] = constant_model(names, rate);
      return;
    }
    if (options.kind == ClassifierKind::kLogistic) {
      bank.classifiers[li] = train_logistic(dense, y, options.lambda, names);
    } else {
      bank.classifiers[li] = train_calibrated_naive_bayes(counts, leaf, options.alpha,
                                                          derive_seed(options.seed, li),
                                                          vocab.features());
    }
  });
  return bank;
}

PageDecision classify_page_one_vs_all(const GenreClassifierBank& bank, const FeatureVector& fv) {
  const auto& leaves = bank.taxonomy.leaves();
  if (bank.classifiers.size() != leaves.size()) throw Error("classifier bank is incomplete");
  PageDecision d;
  double best = -1.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const double p = predict_proba(bank.classifiers[i], fv);
    d.posteriors[leaves[i]] = p;
    if (p > best || (p == best && leaves[i] < d.leaf)) {
      best = p;
      d.leaf = leaves[i];
    }
  }
  d.superclass = bank.taxonomy.superclass_of(d.leaf);
  return d;
}

}  // namespace genremap
