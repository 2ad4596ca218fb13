#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "genremap/classify.hpp"
#include "genremap/corpus.hpp"

namespace genremap {

// ---------------------------------------------------------------------------
// Volume-level classifiers

struct VolumeClassifierOptions {
  std::size_t candidates = 1200;  // most common words considered
  std::size_t k_per_side = 20;    // rank-sum selected words per direction; 0 keeps all
  ClassifierKind kind = ClassifierKind::kNaiveBayes;
  double alpha = 1.0;
  double lambda = 1.0;
  std::uint64_t seed = 0;
};

// Builds a candidate vocabulary from `volumes`, keeps the words that best
// separate `positive` from the rest by rank-sum z, and trains a calibrated
// naive Bayes (or logistic) model on whole-volume features.
BinaryModel train_volume_classifier(const std::vector<Volume>& volumes,
                                    std::span<const GenreId> labels, const GenreId& positive,
                                    const VolumeClassifierOptions& options);

// Probability that the volume belongs to the model's positive class.
double predict_volume(const BinaryModel& model, const Volume& volume);

// ---------------------------------------------------------------------------
// Time-sliced ensembles

enum class Weighting { kTriangular, kUniform, kCosine };
Weighting parse_weighting(const std::string& name);
std::string weighting_name(Weighting w);

struct TimeSlice {
  int start_year = 0;
  int end_year = 0;
  BinaryModel model;
  std::string model_path;  // as written in the ensemble file
};

struct TimeSlicedEnsemble {
  std::vector<TimeSlice> slices;
  Weighting weighting = Weighting::kTriangular;

  int coverage_start() const;
  int coverage_end() const;
};

// Weight of a slice's vote for a volume from `year`; zero outside
// [start, end]. Triangular weights peak at 1 at the midpoint.
double slice_weight(int start_year, int end_year, int year,
                    Weighting weighting = Weighting::kTriangular);
double slice_weight(const TimeSlice& slice, int year, Weighting weighting = Weighting::kTriangular);

struct EnsemblePrediction {
  double probability = 0.0;
  bool out_of_coverage = false;  // no slice had positive weight; nearest slice used
};

// Weighted mean of per-slice probabilities for a given year.
EnsemblePrediction combine_slice_predictions(const TimeSlicedEnsemble& ensemble,
                                             std::span<const double> slice_probabilities,
                                             int year);
// All slices read the same feature vector.
EnsemblePrediction ensemble_predict(const TimeSlicedEnsemble& ensemble, const FeatureVector& fv,
                                    int year);
// Each slice extracts features with its own vocabulary.
EnsemblePrediction ensemble_predict(const TimeSlicedEnsemble& ensemble, const Volume& volume);

// {"slices": [{"start", "end", "model_path"}], "weighting"}; model paths
// are resolved relative to the ensemble file.
void save_ensemble(const std::filesystem::path& path, const TimeSlicedEnsemble& ensemble);
TimeSlicedEnsemble load_ensemble(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Agreement between two models

struct AgreementResult {
  double r = 0.0;
  std::vector<std::string> volume_ids;
  std::vector<double> p_a;
  std::vector<double> p_b;
};

AgreementResult model_agreement(const BinaryModel& model_a, const BinaryModel& model_b,
                                const std::vector<Volume>& volumes);
// Agreement from per-volume probabilities already computed.
AgreementResult model_agreement(std::vector<std::string> volume_ids, std::vector<double> p_a,
                                std::vector<double> p_b);

// volume_id,p_a,p_b
std::string agreement_to_csv(const AgreementResult& result);

}  // namespace genremap
