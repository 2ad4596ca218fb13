#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "genremap/classify.hpp"
#include "genremap/corpus.hpp"

namespace genremap {

inline constexpr double kEmissionFloor = 1e-9;
inline constexpr double kDefaultKappa = 0.5;

struct HmmModel {
  std::vector<GenreId> states;
  std::vector<double> initial;                   // pi
  std::vector<std::vector<double>> transitions;  // row-stochastic, [from][to]
  double kappa = kDefaultKappa;
  // Page-level state frequencies, used to turn classifier posteriors into
  // scaled likelihoods. Uniform when not estimated.
  std::vector<double> priors;

  std::size_t state_index(const GenreId& g) const;
  std::map<GenreId, double> prior_map() const;
};

// Additively smoothed transition, initial and page-prior estimates from
// gold-labelled volumes. States follow the taxonomy's leaf order.
HmmModel estimate_transition_matrix(const std::vector<Volume>& labeled,
                                    const GenreTaxonomy& taxonomy, double kappa);

// Scaled likelihoods posterior/prior, floored, normalized over `states` and
// returned as logs in state order.
std::vector<double> posteriors_to_emissions(const std::vector<GenreId>& states,
                                            const std::map<GenreId, double>& posteriors,
                                            const std::map<GenreId, double>& class_priors);

struct DecodedVolume {
  std::vector<GenreId> labels;
  std::vector<double> page_scores;  // emission log-score of the chosen state per page
  double log_probability = 0.0;
};

// Most probable state path; exact score ties go to the smaller state id.
DecodedVolume viterbi_decode(const HmmModel& hmm, const std::vector<std::vector<double>>& emissions);

// log pi(s1) + sum log A + sum emissions for an explicit path of state indices.
double path_log_probability(const HmmModel& hmm, const std::vector<std::vector<double>>& emissions,
                            std::span<const std::size_t> path);

struct SmoothedVolume {
  std::string volume_id;
  std::vector<GenreId> raw_labels;  // one-vs-all argmax per page
  DecodedVolume decoded;
};

SmoothedVolume smooth_volume(const GenreClassifierBank& bank, const HmmModel& hmm,
                             const Volume& volume, const Vocabulary& vocab);
// Same, from per-page leaf posteriors already computed.
SmoothedVolume smooth_posteriors(const HmmModel& hmm, const std::string& volume_id,
                                 const std::vector<PageDecision>& pages);

// {"volume_id", "raw_labels", "smoothed_labels", "logprob"}
std::string smoothed_to_json_line(const SmoothedVolume& s);
SmoothedVolume smoothed_from_json_line(const std::string& line);

}  // namespace genremap
