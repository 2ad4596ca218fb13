#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "genremap/classify.hpp"
#include "genremap/corpus.hpp"
#include "genremap/ensemble.hpp"

namespace genremap {

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<GenreId> classes);
  ConfusionMatrix(std::vector<GenreId> classes, std::vector<std::vector<std::size_t>> counts);

  void add(const GenreId& actual, const GenreId& predicted, std::size_t n = 1);
  void merge(const ConfusionMatrix& other);

  const std::vector<GenreId>& classes() const { return classes_; }
  // counts()[actual][predicted]
  const std::vector<std::vector<std::size_t>>& counts() const { return counts_; }
  std::size_t total() const;

 private:
  std::size_t index_of(const GenreId& g) const;
  std::vector<GenreId> classes_;
  std::vector<std::vector<std::size_t>> counts_;
};

struct ClassMetrics {
  GenreId genre;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // actual items of this class
  bool present = false;     // support > 0
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double macro_f1 = 0.0;  // mean over present classes
  double micro_f1 = 0.0;  // pooled; equals accuracy for single-label data

  const ClassMetrics& for_class(const GenreId& g) const;
};

MetricsReport f1_scores(const ConfusionMatrix& cm);

// class,precision,recall,f1 rows for present classes, then macro and micro.
std::string metrics_to_csv(const MetricsReport& report);
// class,raw_f1,smoothed_f1 over classes present in either report, then macro and micro.
std::string comparison_to_csv(const MetricsReport& raw, const MetricsReport& smoothed);

struct Fold {
  std::vector<std::size_t> train;  // volume indices, ascending
  std::vector<std::size_t> test;
};

// Seeded shuffle, then k contiguous near-equal folds.
std::vector<Fold> kfold_by_volume(std::size_t n_volumes, std::size_t k, std::uint64_t seed);

struct PipelineConfig {
  std::size_t vocab_size = 250;
  BankOptions bank;
  double kappa = 0.5;
  int jobs = 1;
};

struct CrossValidationResult {
  ConfusionMatrix raw;
  ConfusionMatrix smoothed;
  MetricsReport raw_report;
  MetricsReport smoothed_report;
};

// Per fold: vocabulary, classifier bank and HMM from the training volumes
// only, then raw one-vs-all and HMM-smoothed page labels on the test
// volumes. Confusion matrices are pooled across folds.
CrossValidationResult crossvalidate_pipeline(const std::vector<Volume>& volumes,
                                             const GenreTaxonomy& taxonomy, std::size_t k,
                                             std::uint64_t seed, const PipelineConfig& config);

struct VolumeCrossValidation {
  ConfusionMatrix cm;
  MetricsReport report;
  std::vector<double> probabilities;  // out-of-fold, per input volume
};

// Volume-level counterpart: each volume is labelled by its majority gold
// label, a volume classifier for `positive` is trained per fold and test
// volumes are assigned `positive` when p >= 0.5, else `negative_label`.
VolumeCrossValidation crossvalidate_volume_classifier(const std::vector<Volume>& volumes,
                                                      const GenreId& positive,
                                                      const GenreId& negative_label,
                                                      std::size_t k, std::uint64_t seed,
                                                      const VolumeClassifierOptions& options,
                                                      int jobs = 1);

struct TrendBin {
  int start_year = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n); 0 when n == 1
};

struct TrendSeries {
  std::vector<TrendBin> bins;
};

// Bins start at min(years) and are bin_width wide; empty bins are omitted.
TrendSeries time_binned_means(std::span<const double> values, std::span<const int> years,
                              int bin_width);
// bin_start,n,mean,stderr
std::string trend_to_csv(const TrendSeries& series);

}  // namespace genremap
