#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "genremap/corpus.hpp"

namespace genremap {

// How one genre writes pages.
struct GenreGenerator {
  GenreId genre;
  std::vector<double> unigram;  // over the spec lexicon, sums to 1
  int line_chars_min = 60;
  int line_chars_max = 80;
  double cap_prob = 0.1;  // probability a line starts with a capital
  int lines_min = 20;
  int lines_max = 30;
  // Probability that a volume opens (closes) with a 1-2 page run of this
  // genre in addition to its Markov-chain pages.
  double front_affinity = 0.0;
  double back_affinity = 0.0;
};

struct EraDrift {
  int pivot_year = 0;      // volumes from this year on use drifted unigrams
  double magnitude = 0.0;  // sd of the log-space perturbation per word
};

struct CorpusSpec {
  std::size_t n_volumes = 60;
  int pages_min = 30;
  int pages_max = 50;
  int year_min = 1700;
  int year_max = 1899;
  std::vector<std::string> lexicon;
  std::vector<GenreGenerator> genres;
  std::vector<double> initial;                   // pi*
  std::vector<std::vector<double>> transitions;  // A*, row-stochastic
  EraDrift drift;
  double ocr_noise = 0.0;  // per-letter substitution rate
  std::uint64_t seed = 0;
};

// Zipf base distribution with per-genre boosts, as read from a spec file.
struct GenreRecipe {
  GenreId genre;
  std::size_t signature_words = 40;  // random mid-frequency words boosted for this genre
  double boost = 4.0;
  std::map<std::string, double> boost_words;  // explicit multipliers
  int line_chars_min = 60;
  int line_chars_max = 80;
  double cap_prob = 0.1;
  int lines_min = 20;
  int lines_max = 30;
  double front_affinity = 0.0;
  double back_affinity = 0.0;
};

// Real English function words, pronouns and a few content words, followed
// by deterministic pseudo-words up to `size` entries.
std::vector<std::string> make_lexicon(std::size_t size);
std::vector<double> zipf_weights(std::size_t n, double exponent);
// Expands recipes into explicit unigram generators.
std::vector<GenreGenerator> expand_recipes(const std::vector<GenreRecipe>& recipes,
                                           const std::vector<std::string>& lexicon,
                                           double zipf_exponent, std::uint64_t seed);

// Throws Error naming the offending field.
void validate_spec(const CorpusSpec& spec);

// Samples each volume's genre sequence from (pi*, A*) and its pages from the
// genre generators. Per-volume random streams derive from the seed, so the
// corpus is identical for any `jobs`.
std::vector<Volume> generate_corpus(const CorpusSpec& spec, int jobs = 1);

// Spec file: {"n_volumes", "pages": [min, max], "years": [min, max],
// "seed", "lexicon_size", "zipf_exponent", "genres": [recipe...],
// "initial"?, "transitions"? | "self_transition"?, "drift"?, "ocr_noise"?}
CorpusSpec spec_from_json(const nlohmann::json& j);
CorpusSpec load_spec(const std::string& path);

// Six-genre page corpus with a diagonal-dominant chain.
nlohmann::json page_corpus_spec_json(std::uint64_t seed);
// Single-genre first- and third-person novels.
nlohmann::json point_of_view_spec_json(std::uint64_t seed);
// Taxonomy for the point-of-view corpus.
GenreTaxonomy point_of_view_taxonomy();

// Transition matrix with `self_prob` on the diagonal and the remainder
// spread evenly.
std::vector<std::vector<double>> sticky_transitions(std::size_t n, double self_prob);

}  // namespace genremap
