#pragma once

#include <span>
#include <string>
#include <vector>

#include "genremap/corpus.hpp"

namespace genremap {

enum class Direction { kAHigher, kBHigher };

struct RankSumCore {
  double u = 0.0;  // pairs (a, b) with a > b, ties counting one half
  double z = 0.0;  // tie- and continuity-corrected normal approximation
  bool degenerate = false;  // pooled sample has zero rank variance
};

struct RankSumResult {
  std::string word;
  double u_statistic = 0.0;
  double z_score = 0.0;
  Direction direction = Direction::kAHigher;
};

// Mann-Whitney U for sample a against b using mid-ranks over the pooled
// values. z is positive when a tends to be larger.
RankSumCore wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

struct FeatureSelection {
  std::vector<RankSumResult> positive;  // characteristic of corpus A
  std::vector<RankSumResult> negative;  // characteristic of corpus B
};

// Ranks each candidate word by the rank-sum z of its per-document relative
// frequency and keeps the k strongest in each direction. The feature vectors
// must be extracted with `candidates` as vocabulary.
FeatureSelection select_discriminative_features(std::span<const FeatureVector> corpus_a,
                                                std::span<const FeatureVector> corpus_b,
                                                const Vocabulary& candidates, std::size_t k);

// Selected words, positive list first.
std::vector<std::string> selected_words(const FeatureSelection& selection);
// {"positive": [...], "negative": [...], "z": {word: z}}
std::string selection_to_json(const FeatureSelection& selection);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct CorrelationRecord {
  std::string word;
  double r = 0.0;
  std::size_t n = 0;
};

// Correlates each vocabulary word's whole-volume relative frequency with a
// per-volume target; zero-variance words are skipped. Sorted by r descending.
std::vector<CorrelationRecord> mine_correlations(const std::vector<Volume>& volumes,
                                                 const Vocabulary& vocab,
                                                 std::span<const double> target);

std::string correlations_to_csv(const std::vector<CorrelationRecord>& records);

struct PronounLists {
  std::vector<std::string> first_person = {"i",  "me",  "my",   "mine",   "myself",
                                           "we", "us",  "our",  "ours",   "ourselves"};
  std::vector<std::string> third_person = {"he",   "him",  "his",    "himself", "she",
                                           "her",  "hers", "herself", "they",   "them",
                                           "their", "theirs", "themselves"};
};

// (first-person count + 1) / (third-person count + 1).
double pronoun_ratio(const Volume& volume, const PronounLists& lists = {});

}  // namespace genremap
