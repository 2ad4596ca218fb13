#include <fstream>

#include "genremap/config.hpp"
#include "genremap/error.hpp"

namespace genremap {

using json = nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j[key].get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config: bad value for ") + key + ": " + j[key].dump());
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  const RunConfig defaults;
  const json known = config_to_json(defaults);
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw UsageError("config: unknown key: " + key);

  RunConfig c;
  read(j, "taxonomy", c.taxonomy);
  read(j, "names_lexicon", c.names_lexicon);
  read(j, "vocab_size", c.vocab_size);
  read(j, "candidates", c.candidates);
  read(j, "k_per_side", c.k_per_side);
  read(j, "classifier", c.classifier);
  read(j, "volume_classifier", c.volume_classifier);
  read(j, "lambda", c.lambda);
  read(j, "alpha", c.alpha);
  read(j, "kappa", c.kappa);
  read(j, "weighting", c.weighting);
  read(j, "folds", c.folds);
  read(j, "seed", c.seed);
  read(j, "jobs", c.jobs);
  read(j, "positive", c.positive);
  read(j, "threshold", c.threshold);
  read(j, "line_max_chars", c.line_max_chars);
  read(j, "line_window", c.line_window);
  read(j, "verse_last_year", c.verse_last_year);
  read(j, "bin_width", c.bin_width);
  if (j.contains("slices")) {
    if (!j["slices"].is_array()) throw UsageError("config: slices must be an array");
    c.slices.clear();
    for (const auto& s : j["slices"]) {
      if (!s.is_object() || !s.contains("start") || !s.contains("end") ||
          !s["start"].is_number_integer() || !s["end"].is_number_integer())
        throw UsageError("config: each slice needs integer start and end");
      for (const auto& [key, _] : s.items())
        if (key != "start" && key != "end") throw UsageError("config: unknown key: slices[]." + key);
      c.slices.push_back({s["start"].get<int>(), s["end"].get<int>()});
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& c) {
  json slices = json::array();
  for (const auto& s : c.slices) slices.push_back({{"start", s.start}, {"end", s.end}});
  return {{"taxonomy", c.taxonomy},
          {"names_lexicon", c.names_lexicon},
          {"vocab_size", c.vocab_size},
          {"candidates", c.candidates},
          {"k_per_side", c.k_per_side},
          {"classifier", c.classifier},
          {"volume_classifier", c.volume_classifier},
          {"lambda", c.lambda},
          {"alpha", c.alpha},
          {"kappa", c.kappa},
          {"slices", slices},
          {"weighting", c.weighting},
          {"folds", c.folds},
          {"seed", c.seed},
          {"jobs", c.jobs},
          {"positive", c.positive},
          {"threshold", c.threshold},
          {"line_max_chars", c.line_max_chars},
          {"line_window", c.line_window},
          {"verse_last_year", c.verse_last_year},
          {"bin_width", c.bin_width}};
}

}  // namespace genremap
