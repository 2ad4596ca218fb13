#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "genremap/corpus.hpp"
#include "genremap/error.hpp"

namespace genremap {

using json = nlohmann::json;

Page::Page(std::vector<std::string> lines, const Tokenizer& tokenizer) : lines_(std::move(lines)) {
  for (const auto& line : lines_) {
    auto toks = tokenizer.tokenize(line);
    tokens_.insert(tokens_.end(), std::make_move_iterator(toks.begin()),
                   std::make_move_iterator(toks.end()));
  }
}

// ---------------------------------------------------------------------------
// Taxonomy

GenreTaxonomy::GenreTaxonomy(std::vector<Leaf> leaves) {
  if (leaves.empty()) throw Error("taxonomy has no leaves");
  for (auto& leaf : leaves) {
    if (leaf.genre.empty() || leaf.superclass.empty())
      throw Error("taxonomy leaf with empty genre or superclass");
    if (superclass_.count(leaf.genre)) throw Error("duplicate genre in taxonomy: " + leaf.genre);
    index_[leaf.genre] = leaves_.size();
    superclass_[leaf.genre] = leaf.superclass;
    leaves_.push_back(leaf.genre);
  }
}

GenreTaxonomy GenreTaxonomy::default_taxonomy() {
  return GenreTaxonomy({{"fiction", "fiction"},
                        {"biography", "nonfiction"},
                        {"autobiography", "nonfiction"},
                        {"letters", "nonfiction"},
                        {"other-nonfiction", "nonfiction"},
                        {"drama", "drama"},
                        {"poetry", "poetry"},
                        {"title-page", "front-matter"},
                        {"table-of-contents", "front-matter"},
                        {"preface", "front-matter"},
                        {"dedication", "front-matter"},
                        {"subscriber-list", "front-matter"},
                        {"index", "back-matter"},
                        {"ads", "back-matter"},
                        {"appendix", "back-matter"},
                        {"notes", "back-matter"},
                        {"errata", "back-matter"},
                        {"bookplate", "paratext"},
                        {"date-due-slip", "paratext"},
                        {"library-stamp", "paratext"}});
}

GenreTaxonomy GenreTaxonomy::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open taxonomy: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed taxonomy " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("leaves") || !j["leaves"].is_array())
    throw Error("taxonomy " + path.string() + ": missing field: leaves");
  std::vector<Leaf> leaves;
  for (const auto& item : j["leaves"]) {
    if (!item.is_object() || !item.contains("genre") || !item["genre"].is_string() ||
        !item.contains("superclass") || !item["superclass"].is_string())
      throw Error("taxonomy " + path.string() + ": each leaf needs string genre and superclass");
    leaves.push_back({item["genre"].get<std::string>(), item["superclass"].get<std::string>()});
  }
  return GenreTaxonomy(std::move(leaves));
}

const GenreId& GenreTaxonomy::superclass_of(const GenreId& leaf) const {
  auto it = superclass_.find(leaf);
  if (it == superclass_.end()) throw Error("unknown genre: " + leaf);
  return it->second;
}

std::size_t GenreTaxonomy::index_of(const GenreId& leaf) const {
  auto it = index_.find(leaf);
  if (it == index_.end()) throw Error("unknown genre: " + leaf);
  return it->second;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> features) : features_(std::move(features)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!index_.emplace(features_[i], i).second)
      throw Error("duplicate feature in vocabulary: " + features_[i]);
  }
}

long Vocabulary::index_of(const std::string& feature) const {
  auto it = index_.find(feature);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

Vocabulary build_vocabulary(const std::vector<Volume>& volumes, std::size_t n) {
  if (n < 1) throw Error("vocabulary size must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& v : volumes)
    for (const auto& p : v.pages)
      for (const auto& t : p.tokens()) ++counts[t];
  if (counts.empty()) throw Error("empty corpus");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  if (n < ranked.size()) {
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(n), ranked.end(), better);
    ranked.resize(n);
  } else {
    std::sort(ranked.begin(), ranked.end(), better);
  }
  std::vector<std::string> features;
  features.reserve(ranked.size());
  for (auto& [word, _] : ranked) features.push_back(word);
  return Vocabulary(std::move(features));
}

// ---------------------------------------------------------------------------
// Features

std::vector<double> FeatureVector::word_counts() const {
  std::vector<double> counts(word_freqs.size());
  const double total = static_cast<double>(std::max<std::size_t>(1, token_count));
  for (std::size_t i = 0; i < word_freqs.size(); ++i)
    counts[i] = std::round(word_freqs[i] * total);
  return counts;
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out = word_freqs;
  out.push_back(rel_length);
  out.push_back(rel_position);
  out.push_back(capline_density);
  return out;
}

std::vector<std::string> dense_feature_names(const Vocabulary& vocab) {
  std::vector<std::string> names = vocab.features();
  names.emplace_back("@rel_length");
  names.emplace_back("@rel_position");
  names.emplace_back("@capline_density");
  return names;
}

Vocabulary vocabulary_from_dense_names(const std::vector<std::string>& names) {
  if (names.size() < kStructuralFeatureCount ||
      names[names.size() - kStructuralFeatureCount] != "@rel_length")
    throw Error("feature names do not end with the structural features");
  return Vocabulary(std::vector<std::string>(names.begin(), names.end() - kStructuralFeatureCount));
}

double capline_density(const std::vector<std::string>& lines) {
  std::size_t nonempty = 0, capitalized = 0;
  for (const auto& line : lines) {
    if (line.find_first_not_of(" \t\r\n\f\v") == std::string::npos) continue;
    ++nonempty;
    // First alphabetic character, judged on ASCII and Latin-1 letters.
    for (std::size_t i = 0; i < line.size(); ++i) {
      const auto c = static_cast<unsigned char>(line[i]);
      if (c >= 'A' && c <= 'Z') {
        ++capitalized;
        break;
      }
      if (c >= 'a' && c <= 'z') break;
      if (c == 0xC3 && i + 1 < line.size()) {
        const auto c2 = static_cast<unsigned char>(line[i + 1]);
        if (c2 >= 0x80 && c2 <= 0x9E && c2 != 0x97) ++capitalized;
        if (c2 >= 0x80 && c2 <= 0xBF && c2 != 0x97 && c2 != 0xB7) break;
      }
    }
  }
  return nonempty == 0 ? 0.0 : static_cast<double>(capitalized) / static_cast<double>(nonempty);
}

namespace {

std::vector<double> relative_freqs(const std::vector<const Page*>& pages, const Vocabulary& vocab,
                                   std::size_t* total_tokens) {
  std::vector<double> freqs(vocab.size(), 0.0);
  std::size_t total = 0;
  for (const Page* p : pages) {
    total += p->token_count();
    for (const auto& t : p->tokens()) {
      const long idx = vocab.index_of(t);
      if (idx >= 0) freqs[static_cast<std::size_t>(idx)] += 1.0;
    }
  }
  if (total > 0)
    for (double& f : freqs) f /= static_cast<double>(total);
  *total_tokens = total;
  return freqs;
}

}  // namespace

FeatureVector extract_page_features(const Volume& volume, std::size_t page_index,
                                    const Vocabulary& vocab) {
  if (page_index >= volume.pages.size())
    throw Error("page index " + std::to_string(page_index) + " out of range for volume " +
                volume.volume_id);
  const Page& page = volume.pages[page_index];
  FeatureVector fv;
  fv.word_freqs = relative_freqs({&page}, vocab, &fv.token_count);

  double total = 0.0;
  for (const auto& p : volume.pages) total += static_cast<double>(p.token_count());
  const double mean = total / static_cast<double>(volume.pages.size());
  fv.rel_length = mean > 0.0 ? static_cast<double>(page.token_count()) / mean : 0.0;

  const std::size_t n = volume.pages.size();
  fv.rel_position = n > 1 ? static_cast<double>(page_index) / static_cast<double>(n - 1) : 0.0;
  fv.capline_density = capline_density(page.lines());
  return fv;
}

std::vector<FeatureVector> extract_volume_page_features(const Volume& volume,
                                                        const Vocabulary& vocab) {
  std::vector<FeatureVector> out;
  out.reserve(volume.pages.size());
  for (std::size_t i = 0; i < volume.pages.size(); ++i)
    out.push_back(extract_page_features(volume, i, vocab));
  return out;
}

FeatureVector extract_volume_features(const Volume& volume, const Vocabulary& vocab) {
  std::vector<const Page*> pages;
  std::vector<std::string> lines;
  for (const auto& p : volume.pages) {
    pages.push_back(&p);
    lines.insert(lines.end(), p.lines().begin(), p.lines().end());
  }
  FeatureVector fv;
  fv.word_freqs = relative_freqs(pages, vocab, &fv.token_count);
  fv.rel_length = fv.token_count > 0 ? 1.0 : 0.0;
  fv.rel_position = 0.0;
  fv.capline_density = capline_density(lines);
  return fv;
}

GenreId majority_label(const Volume& volume) {
  if (!volume.gold_labels || volume.gold_labels->empty())
    throw Error("volume " + volume.volume_id + " has no gold labels");
  std::map<GenreId, std::size_t> counts;
  for (const auto& g : *volume.gold_labels) ++counts[g];
  // std::map iterates in lexicographic order, so strict > keeps the smaller id.
  const GenreId* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [g, c] : counts) {
    if (c > best_count) {
      best = &g;
      best_count = c;
    }
  }
  return *best;
}

// ---------------------------------------------------------------------------
// JSONL I/O

namespace {

Volume parse_volume(const json& j, std::size_t line_no, const GenreTaxonomy& taxonomy,
                    const Tokenizer& tokenizer) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  auto require = [&](const char* field) -> const json& {
    if (!j.contains(field)) throw Error(where + "missing field: " + field);
    return j[field];
  };
  if (!j.is_object()) throw Error(where + "record is not a JSON object");

  Volume v;
  const json& id = require("volume_id");
  if (!id.is_string()) throw Error(where + "field volume_id must be a string");
  v.volume_id = id.get<std::string>();

  const json& year = require("year");
  if (!year.is_number_integer()) throw Error(where + "field year must be an integer");
  v.year = year.get<int>();
  if (v.year < 1600 || v.year > 2100)
    throw Error(where + "field year out of range [1600, 2100]: " + std::to_string(v.year));

  const json& pages = require("pages");
  if (!pages.is_array()) throw Error(where + "field pages must be an array");
  if (pages.empty()) throw Error(where + "field pages must be non-empty");
  for (const auto& p : pages) {
    if (!p.is_object() || !p.contains("lines") || !p["lines"].is_array())
      throw Error(where + "missing field: pages[].lines");
    std::vector<std::string> lines;
    for (const auto& l : p["lines"]) {
      if (!l.is_string()) throw Error(where + "field pages[].lines must hold strings");
      lines.push_back(l.get<std::string>());
    }
    v.pages.emplace_back(std::move(lines), tokenizer);
  }

  if (j.contains("labels") && !j["labels"].is_null()) {
    const json& labels = j["labels"];
    if (!labels.is_array()) throw Error(where + "field labels must be an array");
    if (labels.size() != v.pages.size())
      throw Error(where + "field labels has " + std::to_string(labels.size()) +
                  " entries for " + std::to_string(v.pages.size()) + " pages");
    std::vector<GenreId> gold;
    for (const auto& l : labels) {
      if (!l.is_string()) throw Error(where + "field labels must hold strings");
      auto g = l.get<std::string>();
      if (!taxonomy.contains(g)) throw Error(where + "unknown genre: " + g);
      gold.push_back(std::move(g));
    }
    v.gold_labels = std::move(gold);
  }
  return v;
}

}  // namespace

std::vector<Volume> parse_volumes(std::string_view jsonl, const GenreTaxonomy& taxonomy,
                                  const Tokenizer& tokenizer) {
  std::vector<Volume> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    out.push_back(parse_volume(j, line_no, taxonomy, tokenizer));
  }
  return out;
}

std::vector<Volume> load_volumes(const std::filesystem::path& path, const GenreTaxonomy& taxonomy,
                                 const Tokenizer& tokenizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_volumes(buf.str(), taxonomy, tokenizer);
}

std::string volume_to_json_line(const Volume& volume) {
  json j;
  j["volume_id"] = volume.volume_id;
  j["year"] = volume.year;
  json pages = json::array();
  for (const auto& p : volume.pages) pages.push_back({{"lines", p.lines()}});
  j["pages"] = std::move(pages);
  if (volume.gold_labels) j["labels"] = *volume.gold_labels;
  return j.dump();
}

void save_volumes(const std::filesystem::path& path, const std::vector<Volume>& volumes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus: " + path.string());
  for (const auto& v : volumes) out << volume_to_json_line(v) << '\n';
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary: " + path.string());
  out << json{{"features", vocab.features()}}.dump(1) << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed vocabulary " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("features") || !j["features"].is_array())
    throw Error("vocabulary " + path.string() + ": missing field: features");
  return Vocabulary(j["features"].get<std::vector<std::string>>());
}

}  // namespace genremap
