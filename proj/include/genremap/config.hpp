#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace genremap {

struct SliceSpec {
  int start = 0;
  int end = 0;
};

// Settings shared by the CLI subcommands. Every field has a default; a
// config file may set any subset, and command-line flags override both.
struct RunConfig {
  std::string taxonomy;       // empty: built-in twenty-leaf taxonomy
  std::string names_lexicon;  // empty: bundled personal-name list
  std::size_t vocab_size = 250;
  std::size_t candidates = 1200;
  std::size_t k_per_side = 20;
  std::string classifier = "logistic";           // page-level bank
  std::string volume_classifier = "naive_bayes";  // volume-level models
  double lambda = 1.0;
  double alpha = 1.0;
  double kappa = 0.5;
  std::vector<SliceSpec> slices = {{1700, 1800}, {1750, 1850}, {1800, 1900}};
  std::string weighting = "triangular";
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string positive = "fiction";  // target class of volume-level models
  double threshold = 0.5;            // probability at which a volume is flagged positive
  std::size_t line_max_chars = 60;
  std::size_t line_window = 5;
  int verse_last_year = 1899;
  int bin_width = 5;
};

// Rejects unknown keys and ill-typed values with UsageError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace genremap
