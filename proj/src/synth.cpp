#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "genremap/error.hpp"
#include "genremap/model_io.hpp"
#include "genremap/parallel.hpp"
#include "genremap/rng.hpp"
#include "genremap/synth.hpp"

namespace genremap {

using json = nlohmann::json;

namespace {

// Stream ids for seeds derived from the master seed. Volume streams use the
// volume index directly.
constexpr std::uint64_t kRecipeStream = 1ULL << 40;
constexpr std::uint64_t kDriftStream = 2ULL << 40;
constexpr std::uint64_t kNoiseStream = 3ULL << 40;

const std::vector<std::string>& reserved_words() {
  static const std::vector<std::string> words = {
      "the", "of", "and", "to", "a", "in", "that", "was", "it", "with", "for", "as", "at", "be",
      "on", "by", "not", "but", "from", "had", "have", "this", "which", "were", "so", "all", "no",
      "or", "one", "an", "there", "been", "would", "when", "what", "if", "into", "upon", "some",
      "out", "very", "could", "said", "then", "than", "more", "great", "such", "other", "time",
      "now", "before", "after", "made", "any", "only", "little", "good", "first", "two", "three",
      "four", "five", "six", "twenty", "several", "quantity", "ship", "water", "weather", "shore",
      "daughter", "husband", "marriage", "child", "eyes", "heart", "tears", "girl", "woman",
      // pronouns
      "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "he", "him",
      "his", "himself", "she", "her", "hers", "herself", "they", "them", "their", "theirs",
      "themselves", "you", "your",
      // digits become #arabic-number after tokenization
      "1", "7", "12", "24", "36", "48", "103", "250"};
  return words;
}

std::string pseudo_word(std::size_t index) {
  static const char* kConsonants = "bfghjknprstwz";
  static const char* kVowels = "aeouy";
  constexpr std::size_t kSyll = 13 * 5;
  std::string w;
  // Two syllables for the first kSyll^2 words, three after.
  std::size_t n = index;
  const std::size_t syllables = n < kSyll * kSyll ? 2 : 3;
  if (syllables == 3) n -= kSyll * kSyll;
  for (std::size_t s = 0; s < syllables; ++s) {
    const std::size_t syl = n % kSyll;
    n /= kSyll;
    w.push_back(kConsonants[syl / 5]);
    w.push_back(kVowels[syl % 5]);
  }
  return w;
}

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

std::string sample_line(Rng& rng, const DiscreteSampler& words, const std::vector<std::string>& lexicon,
                        const GenreGenerator& g) {
  const auto target = static_cast<std::size_t>(rng.uniform_int(g.line_chars_min, g.line_chars_max));
  std::string line;
  for (;;) {
    const std::string& w = lexicon[words(rng)];
    if (!line.empty() && line.size() + 1 + w.size() > target) break;
    if (!line.empty()) line.push_back(' ');
    line += w;
    if (line.size() >= target) break;
  }
  if (rng.bernoulli(g.cap_prob) && !line.empty() && line[0] >= 'a' && line[0] <= 'z')
    line[0] = static_cast<char>(line[0] - 'a' + 'A');
  return line;
}

void add_noise(std::string& line, Rng& rng, double rate) {
  for (char& c : line) {
    if (((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) && rng.bernoulli(rate))
      c = static_cast<char>('a' + rng.uniform_int(0, 25));
  }
}

}  // namespace

std::vector<std::string> make_lexicon(std::size_t size) {
  std::vector<std::string> lex;
  std::unordered_set<std::string> seen;
  for (const auto& w : reserved_words()) {
    if (lex.size() >= size) break;
    if (seen.insert(w).second) lex.push_back(w);
  }
  for (std::size_t i = 0; lex.size() < size; ++i) {
    std::string w = pseudo_word(i);
    if (seen.insert(w).second) lex.push_back(std::move(w));
  }
  return lex;
}

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  return normalized(std::move(w));
}

std::vector<GenreGenerator> expand_recipes(const std::vector<GenreRecipe>& recipes,
                                           const std::vector<std::string>& lexicon,
                                           double zipf_exponent, std::uint64_t seed) {
  const std::vector<double> base = zipf_weights(lexicon.size(), zipf_exponent);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < lexicon.size(); ++i) index[lexicon[i]] = i;
  const std::size_t first_pseudo = std::min(reserved_words().size(), lexicon.size());
  const std::size_t lo = std::min(lexicon.size(), first_pseudo + 30);
  const std::size_t hi = std::min(lexicon.size(), first_pseudo + 630);

  std::vector<GenreGenerator> out;
  for (std::size_t g = 0; g < recipes.size(); ++g) {
    const GenreRecipe& r = recipes[g];
    std::vector<double> w = base;
    Rng rng(derive_seed(seed, kRecipeStream + g));
    if (r.signature_words > 0 && hi > lo) {
      std::vector<std::size_t> pool;
      for (std::size_t i = lo; i < hi; ++i) pool.push_back(i);
      rng.shuffle(pool);
      for (std::size_t i = 0; i < r.signature_words && i < pool.size(); ++i) w[pool[i]] *= r.boost;
    }
    for (const auto& [word, mult] : r.boost_words) {
      auto it = index.find(word);
      if (it == index.end()) throw Error("invalid spec: genres[" + std::to_string(g) + "].boost_words: '" + word + "' not in lexicon");
      w[it->second] *= mult;
    }
    GenreGenerator gen;
    gen.genre = r.genre;
    gen.unigram = normalized(std::move(w));
    gen.line_chars_min = r.line_chars_min;
    gen.line_chars_max = r.line_chars_max;
    gen.cap_prob = r.cap_prob;
    gen.lines_min = r.lines_min;
    gen.lines_max = r.lines_max;
    gen.front_affinity = r.front_affinity;
    gen.back_affinity = r.back_affinity;
    out.push_back(std::move(gen));
  }
  return out;
}

std::vector<std::vector<double>> sticky_transitions(std::size_t n, double self_prob) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, n > 1 ? (1.0 - self_prob) / static_cast<double>(n - 1) : 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = n > 1 ? self_prob : 1.0;
  return a;
}

void validate_spec(const CorpusSpec& spec) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error("invalid spec: " + field + ": " + why);
  };
  if (spec.n_volumes == 0) fail("n_volumes", "must be at least 1");
  if (spec.pages_min < 1 || spec.pages_max < spec.pages_min) fail("pages", "need 1 <= min <= max");
  if (spec.year_min < 1600 || spec.year_max > 2100 || spec.year_max < spec.year_min)
    fail("years", "need 1600 <= min <= max <= 2100");
  if (spec.lexicon.empty()) fail("lexicon_size", "must be at least 1");
  if (spec.genres.empty()) fail("genres", "must be non-empty");
  const std::size_t s = spec.genres.size();
  std::set<GenreId> ids;
  for (std::size_t g = 0; g < s; ++g) {
    const auto& gen = spec.genres[g];
    const std::string f = "genres[" + std::to_string(g) + "]";
    if (gen.genre.empty() || !ids.insert(gen.genre).second) fail(f + ".genre", "missing or duplicate");
    if (gen.unigram.size() != spec.lexicon.size()) fail(f + ".unigram", "size differs from lexicon");
    double total = 0.0;
    for (double p : gen.unigram) {
      if (!(p >= 0.0)) fail(f + ".unigram", "negative probability");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) fail(f + ".unigram", "does not sum to 1");
    if (gen.line_chars_min < 1 || gen.line_chars_max < gen.line_chars_min) fail(f + ".line_chars", "need 1 <= min <= max");
    if (gen.lines_min < 0 || gen.lines_max < gen.lines_min) fail(f + ".lines", "need 0 <= min <= max");
    if (gen.cap_prob < 0.0 || gen.cap_prob > 1.0) fail(f + ".cap_prob", "must be in [0, 1]");
    if (gen.front_affinity < 0.0 || gen.front_affinity > 1.0) fail(f + ".front_affinity", "must be in [0, 1]");
    if (gen.back_affinity < 0.0 || gen.back_affinity > 1.0) fail(f + ".back_affinity", "must be in [0, 1]");
  }
  auto check_dist = [&](const std::vector<double>& row, const std::string& f) {
    if (row.size() != s) fail(f, "length differs from genre count");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) fail(f, "negative probability");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) fail(f, "does not sum to 1");
  };
  check_dist(spec.initial, "initial");
  if (spec.transitions.size() != s) fail("transitions", "needs one row per genre");
  for (std::size_t i = 0; i < s; ++i) check_dist(spec.transitions[i], "transitions[" + std::to_string(i) + "]");
  if (spec.drift.magnitude < 0.0) fail("drift.magnitude", "must be non-negative");
  if (spec.ocr_noise < 0.0 || spec.ocr_noise > 1.0) fail("ocr_noise", "must be in [0, 1]");
}

std::vector<Volume> generate_corpus(const CorpusSpec& spec, int jobs) {
  validate_spec(spec);
  const std::size_t s = spec.genres.size();

  std::vector<DiscreteSampler> base, drifted;
  for (const auto& g : spec.genres) base.emplace_back(g.unigram);
  const bool drifting = spec.drift.magnitude > 0.0;
  if (drifting) {
    for (std::size_t g = 0; g < s; ++g) {
      Rng rng(derive_seed(spec.seed, kDriftStream + g));
      std::vector<double> w = spec.genres[g].unigram;
      for (double& p : w) p *= std::exp(spec.drift.magnitude * rng.normal());
      drifted.emplace_back(normalized(std::move(w)));
    }
  }
  std::vector<DiscreteSampler> rows;
  for (const auto& row : spec.transitions) rows.emplace_back(row);
  const DiscreteSampler initial(spec.initial);

  const Tokenizer tokenizer;
  std::vector<Volume> out(spec.n_volumes);
  parallel_for(spec.n_volumes, jobs, [&](std::size_t v) {
    Rng rng(derive_seed(spec.seed, v));
    Volume vol;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%05zu", v);
    vol.volume_id = id;
    vol.year = static_cast<int>(rng.uniform_int(spec.year_min, spec.year_max));
    const auto n_pages = static_cast<std::size_t>(rng.uniform_int(spec.pages_min, spec.pages_max));

    std::vector<std::size_t> states;
    for (std::size_t g = 0; g < s; ++g)
      if (spec.genres[g].front_affinity > 0.0 && rng.bernoulli(spec.genres[g].front_affinity))
        states.insert(states.end(), static_cast<std::size_t>(rng.uniform_int(1, 2)), g);
    std::size_t state = initial(rng);
    for (std::size_t t = 0; t < n_pages; ++t) {
      if (t > 0) state = rows[state](rng);
      states.push_back(state);
    }
    for (std::size_t g = 0; g < s; ++g)
      if (spec.genres[g].back_affinity > 0.0 && rng.bernoulli(spec.genres[g].back_affinity))
        states.insert(states.end(), static_cast<std::size_t>(rng.uniform_int(1, 2)), g);

    const bool late = drifting && vol.year >= spec.drift.pivot_year;
    Rng noise(derive_seed(spec.seed, kNoiseStream + v));
    std::vector<GenreId> labels;
    for (std::size_t g : states) {
      const GenreGenerator& gen = spec.genres[g];
      const DiscreteSampler& words = late ? drifted[g] : base[g];
      const auto n_lines = rng.uniform_int(gen.lines_min, gen.lines_max);
      std::vector<std::string> lines;
      for (std::int64_t l = 0; l < n_lines; ++l) {
        std::string line = sample_line(rng, words, spec.lexicon, gen);
        if (spec.ocr_noise > 0.0) add_noise(line, noise, spec.ocr_noise);
        lines.push_back(std::move(line));
      }
      vol.pages.emplace_back(std::move(lines), tokenizer);
      labels.push_back(gen.genre);
    }
    vol.gold_labels = std::move(labels);
    out[v] = std::move(vol);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Spec files

namespace {

std::pair<int, int> read_range(const json& j, const char* field, std::pair<int, int> fallback) {
  if (!j.contains(field)) return fallback;
  const json& r = j[field];
  if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
    throw Error(std::string("invalid spec: ") + field + ": expected [min, max]");
  return {r[0].get<int>(), r[1].get<int>()};
}

}  // namespace

CorpusSpec spec_from_json(const json& j) {
  static const std::set<std::string> kKeys = {"n_volumes", "pages", "years", "seed", "lexicon_size",
                                              "zipf_exponent", "genres", "initial", "transitions",
                                              "self_transition", "drift", "ocr_noise"};
  static const std::set<std::string> kGenreKeys = {
      "genre", "signature_words", "boost", "boost_words", "line_chars", "cap_prob",
      "lines", "front_affinity", "back_affinity"};
  if (!j.is_object()) throw Error("invalid spec: not a JSON object");
  for (const auto& [k, _] : j.items())
    if (!kKeys.count(k)) throw Error("invalid spec: unknown field: " + k);
  try {
    CorpusSpec spec;
    spec.n_volumes = j.value("n_volumes", std::size_t{60});
    std::tie(spec.pages_min, spec.pages_max) = read_range(j, "pages", {30, 50});
    std::tie(spec.year_min, spec.year_max) = read_range(j, "years", {1700, 1899});
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.lexicon = make_lexicon(j.value("lexicon_size", std::size_t{2000}));
    spec.ocr_noise = j.value("ocr_noise", 0.0);
    if (j.contains("drift")) {
      spec.drift.pivot_year = j["drift"].at("pivot_year").get<int>();
      spec.drift.magnitude = j["drift"].at("magnitude").get<double>();
    }
    if (!j.contains("genres") || !j["genres"].is_array()) throw Error("invalid spec: missing field: genres");
    std::vector<GenreRecipe> recipes;
    for (const auto& g : j["genres"]) {
      for (const auto& [k, _] : g.items())
        if (!kGenreKeys.count(k)) throw Error("invalid spec: unknown field: genres[]." + k);
      GenreRecipe r;
      if (!g.contains("genre")) throw Error("invalid spec: missing field: genres[].genre");
      r.genre = g["genre"].get<std::string>();
      r.signature_words = g.value("signature_words", r.signature_words);
      r.boost = g.value("boost", r.boost);
      if (g.contains("boost_words")) r.boost_words = g["boost_words"].get<std::map<std::string, double>>();
      std::tie(r.line_chars_min, r.line_chars_max) = read_range(g, "line_chars", {r.line_chars_min, r.line_chars_max});
      std::tie(r.lines_min, r.lines_max) = read_range(g, "lines", {r.lines_min, r.lines_max});
      r.cap_prob = g.value("cap_prob", r.cap_prob);
      r.front_affinity = g.value("front_affinity", 0.0);
      r.back_affinity = g.value("back_affinity", 0.0);
      recipes.push_back(std::move(r));
    }
    spec.genres = expand_recipes(recipes, spec.lexicon, j.value("zipf_exponent", 1.0), spec.seed);
    const std::size_t s = spec.genres.size();
    if (j.contains("initial"))
      spec.initial = j["initial"].get<std::vector<double>>();
    else
      spec.initial.assign(s, 1.0 / static_cast<double>(s));
    if (j.contains("transitions"))
      spec.transitions = j["transitions"].get<std::vector<std::vector<double>>>();
    else
      spec.transitions = sticky_transitions(s, j.value("self_transition", 0.9));
    validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid spec: ") + e.what());
  }
}

CorpusSpec load_spec(const std::string& path) { return spec_from_json(read_json_file(path)); }

json page_corpus_spec_json(std::uint64_t seed) {
  auto genre = [](const char* id, std::pair<int, int> chars, double cap, std::pair<int, int> lines,
                  double boost) {
    return json{{"genre", id},
                {"signature_words", 40},
                {"boost", boost},
                {"line_chars", {chars.first, chars.second}},
                {"cap_prob", cap},
                {"lines", {lines.first, lines.second}}};
  };
  return json{{"n_volumes", 60},
              {"pages", {30, 50}},
              {"years", {1700, 1899}},
              {"seed", seed},
              {"lexicon_size", 2000},
              {"zipf_exponent", 1.0},
              {"genres",
               {genre("fiction", {55, 80}, 0.2, {4, 8}, 7.0),
                genre("other-nonfiction", {55, 80}, 0.2, {4, 8}, 7.0),
                genre("biography", {55, 80}, 0.2, {4, 8}, 7.0),
                genre("drama", {30, 70}, 0.6, {4, 8}, 7.0),
                genre("poetry", {25, 55}, 0.8, {4, 8}, 7.0),
                genre("index", {20, 45}, 0.7, {4, 8}, 7.0)}},
              {"self_transition", 0.95}};
}

json point_of_view_spec_json(std::uint64_t seed) {
  const json style = {{"line_chars", {55, 80}}, {"cap_prob", 0.15}, {"lines", {25, 35}}};
  json first = {{"genre", "first-person"},
                {"signature_words", 20},
                {"boost", 1.25},
                {"boost_words",
                 {{"i", 2.0}, {"me", 2.0}, {"my", 2.0}, {"we", 1.75}, {"us", 1.75}, {"our", 1.75},
                  {"three", 1.25}, {"ship", 1.25}, {"water", 1.2}, {"1", 1.15}}}};
  json third = {{"genre", "third-person"},
                {"signature_words", 20},
                {"boost", 1.25},
                {"boost_words",
                 {{"he", 1.4}, {"she", 1.6}, {"her", 1.6}, {"his", 1.3}, {"him", 1.3},
                  {"daughter", 1.3}, {"husband", 1.3}, {"marriage", 1.25}}}};
  first.update(style);
  third.update(style);
  return json{{"n_volumes", 288},
              {"pages", {8, 12}},
              {"years", {1700, 1899}},
              {"seed", seed},
              {"lexicon_size", 2000},
              {"zipf_exponent", 1.0},
              {"genres", {first, third}},
              {"initial", {0.41, 0.59}},
              {"transitions", {{1.0, 0.0}, {0.0, 1.0}}}};
}

GenreTaxonomy point_of_view_taxonomy() {
  return GenreTaxonomy({{"first-person", "fiction"}, {"third-person", "fiction"}});
}

}  // namespace genremap
