#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace genremap {

using GenreId = std::string;

// Compressed-category tokens emitted by the tokenizer.
inline constexpr std::string_view kPersonalName = "#personal-name";
inline constexpr std::string_view kRomanNumeral = "#roman-numeral";
inline constexpr std::string_view kArabicNumber = "#arabic-number";

// Splits text into lowercased word tokens. Letters plus internal
// apostrophes form words; digit runs, roman numerals and capitalized names
// found in the lexicon collapse into the compressed categories above. The
// long-s glyph is read as 's'.
class Tokenizer {
 public:
  Tokenizer();  // bundled name lexicon
  explicit Tokenizer(std::unordered_set<std::string> name_lexicon);

  // Newline-delimited word list; entries are lowercased.
  static Tokenizer from_lexicon_file(const std::filesystem::path& path);

  std::vector<std::string> tokenize(std::string_view text) const;
  std::size_t count_tokens(std::string_view text) const;

  const std::unordered_set<std::string>& names() const { return names_; }

 private:
  Tokenizer(std::unordered_set<std::string> normalized_names, int);
  std::unordered_set<std::string> names_;
};

std::vector<std::string> tokenize(std::string_view text);
std::vector<std::string> default_name_lexicon();

// True for strings like "xii" or "MCMXV" (length >= 2, case-insensitive).
bool is_roman_numeral(std::string_view word);

class Page {
 public:
  Page() = default;
  Page(std::vector<std::string> lines, const Tokenizer& tokenizer);

  const std::vector<std::string>& lines() const { return lines_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t token_count() const { return tokens_.size(); }

 private:
  std::vector<std::string> lines_;
  std::vector<std::string> tokens_;
};

struct Volume {
  std::string volume_id;
  int year = 0;
  std::vector<Page> pages;
  std::optional<std::vector<GenreId>> gold_labels;
};

class GenreTaxonomy {
 public:
  struct Leaf {
    GenreId genre;
    GenreId superclass;
  };

  GenreTaxonomy() = default;
  explicit GenreTaxonomy(std::vector<Leaf> leaves);

  // Twenty leaves grouped under fiction, nonfiction, drama, poetry,
  // front-matter, back-matter and paratext.
  static GenreTaxonomy default_taxonomy();
  // {"leaves": [{"genre": ..., "superclass": ...}, ...]}
  static GenreTaxonomy from_file(const std::filesystem::path& path);

  const std::vector<GenreId>& leaves() const { return leaves_; }
  const GenreId& superclass_of(const GenreId& leaf) const;
  bool contains(const GenreId& leaf) const { return superclass_.count(leaf) > 0; }
  std::size_t index_of(const GenreId& leaf) const;
  std::size_t size() const { return leaves_.size(); }

 private:
  std::vector<GenreId> leaves_;
  std::map<GenreId, GenreId> superclass_;
  std::map<GenreId, std::size_t> index_;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> features);

  const std::vector<std::string>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  // Index of a feature, or -1 when absent.
  long index_of(const std::string& feature) const;

 private:
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct FeatureVector {
  std::vector<double> word_freqs;
  double rel_length = 0.0;
  double rel_position = 0.0;
  double capline_density = 0.0;
  std::size_t token_count = 0;

  // Raw word counts recovered from the relative frequencies.
  std::vector<double> word_counts() const;
  // word_freqs followed by the three structural features.
  std::vector<double> dense() const;
};

inline constexpr std::size_t kStructuralFeatureCount = 3;
// Feature names matching FeatureVector::dense() for a vocabulary.
std::vector<std::string> dense_feature_names(const Vocabulary& vocab);
// Recovers the word part of a dense feature-name list.
Vocabulary vocabulary_from_dense_names(const std::vector<std::string>& names);

// Most frequent n feature ids, descending count, lexicographic tie-break.
Vocabulary build_vocabulary(const std::vector<Volume>& volumes, std::size_t n);

FeatureVector extract_page_features(const Volume& volume, std::size_t page_index,
                                    const Vocabulary& vocab);
std::vector<FeatureVector> extract_volume_page_features(const Volume& volume,
                                                        const Vocabulary& vocab);
// Whole-volume features: word frequencies over all pages, capitalization
// density over all lines, rel_length 1 and rel_position 0.
FeatureVector extract_volume_features(const Volume& volume, const Vocabulary& vocab);

// Fraction of non-empty lines whose first alphabetic character is uppercase.
double capline_density(const std::vector<std::string>& lines);

// Most common gold label of the volume, lexicographic tie-break.
GenreId majority_label(const Volume& volume);

std::vector<Volume> load_volumes(const std::filesystem::path& path,
                                 const GenreTaxonomy& taxonomy,
                                 const Tokenizer& tokenizer = Tokenizer());
std::vector<Volume> parse_volumes(std::string_view jsonl, const GenreTaxonomy& taxonomy,
                                  const Tokenizer& tokenizer = Tokenizer());
void save_volumes(const std::filesystem::path& path, const std::vector<Volume>& volumes);
std::string volume_to_json_line(const Volume& volume);

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace genremap
