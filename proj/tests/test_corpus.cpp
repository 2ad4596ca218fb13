#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "genremap/corpus.hpp"
#include "genremap/error.hpp"
#include "genremap/rng.hpp"
#include "oracles.hpp"

using namespace genremap;

namespace {

Volume make_volume(std::vector<std::vector<std::string>> pages, int year = 1800,
                   std::optional<std::vector<GenreId>> labels = std::nullopt) {
  Volume v;
  v.volume_id = "v";
  v.year = year;
  const Tokenizer tok;
  for (auto& p : pages) v.pages.emplace_back(std::move(p), tok);
  v.gold_labels = std::move(labels);
  return v;
}

std::string contents_error(const std::string& jsonl) {
  try {
    parse_volumes(jsonl, GenreTaxonomy::default_taxonomy());
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("tokenizer lowercases and keeps internal apostrophes") {
  CHECK(tokenize("He kill'd THREE Goats.") ==
        std::vector<std::string>{"he", "kill'd", "three", "goats"});
  CHECK(tokenize("'Tis the end' of it") == std::vector<std::string>{"tis", "the", "end", "of", "it"});
  CHECK(tokenize("don\xE2\x80\x99t") == std::vector<std::string>{"don't"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  ,;. ").empty());
}

TEST_CASE("tokenizer compresses roman numerals and digit runs") {
  CHECK(tokenize("Chapter XII") == std::vector<std::string>{"chapter", "#roman-numeral"});
  CHECK(tokenize("in 1719 there were 43 goats") ==
        std::vector<std::string>{"in", "#arabic-number", "there", "were", "#arabic-number", "goats"});
  CHECK(is_roman_numeral("xiv"));
  CHECK(is_roman_numeral("MCMXV"));
  CHECK_FALSE(is_roman_numeral("i"));
  CHECK_FALSE(is_roman_numeral("iiii"));
  CHECK_FALSE(is_roman_numeral("vx"));
  CHECK_FALSE(is_roman_numeral("mix x"));
  // A lone "I" is the pronoun.
  CHECK(tokenize("I saw") == std::vector<std::string>{"i", "saw"});
}

TEST_CASE("tokenizer maps long s and capitalized lexicon names") {
  CHECK(tokenize("ſeaſon") == std::vector<std::string>{"season"});
  const Tokenizer tok(std::unordered_set<std::string>{"Crusoe", "friday"});
  CHECK(tok.tokenize("Crusoe met Friday on a friday") ==
        std::vector<std::string>{"#personal-name", "met", "#personal-name", "on", "a", "friday"});
}

TEST_CASE("tokenizer is idempotent on its own output") {
  Rng rng(5);
  const std::vector<std::string> pieces = {"The", "ſhip", "XIV", "1719", "kill'd", "Emma", "  ", ",", "and", "MDCC", "é", "Ünter"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const auto n = rng.uniform_int(0, 12);
    for (int i = 0; i < n; ++i) text += pieces[static_cast<std::size_t>(rng.uniform_int(0, 11))] + " ";
    const auto once = tokenize(text);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(tokenize(joined) == once);
  }
}

TEST_CASE("name lexicon loads from a newline-delimited file") {
  const auto path = std::filesystem::temp_directory_path() / "genremap_names.txt";
  {
    std::ofstream out(path);
    out << "Pamela\n\nlovelace\n";
  }
  const auto tok = Tokenizer::from_lexicon_file(path);
  CHECK(tok.tokenize("Pamela and Lovelace") ==
        std::vector<std::string>{"#personal-name", "and", "#personal-name"});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Tokenizer::from_lexicon_file(path), Error);
}

TEST_CASE("page token count sums the tokens of its lines") {
  const Tokenizer tok;
  Page p({"One two", "", "three 4"}, tok);
  CHECK(p.token_count() == 4);
  CHECK(p.token_count() == tok.count_tokens("One two") + tok.count_tokens("three 4"));
}

TEST_CASE("default taxonomy has twenty leaves under seven superclasses") {
  const auto t = GenreTaxonomy::default_taxonomy();
  CHECK(t.size() == 20);
  for (const char* g : {"fiction", "biography", "autobiography", "other-nonfiction", "drama", "poetry",
                        "title-page", "bookplate", "table-of-contents", "subscriber-list", "ads", "index",
                        "date-due-slip"})
    CHECK(t.contains(g));
  CHECK(t.superclass_of("biography") == "nonfiction");
  CHECK(t.superclass_of("index") == "back-matter");
  std::set<GenreId> supers;
  for (const auto& g : t.leaves()) supers.insert(t.superclass_of(g));
  CHECK(supers == std::set<GenreId>{"fiction", "nonfiction", "drama", "poetry", "front-matter",
                                    "back-matter", "paratext"});
  CHECK_THROWS_AS(t.superclass_of("fictionn"), Error);
}

TEST_CASE("taxonomy file overrides the default") {
  const auto path = std::filesystem::temp_directory_path() / "genremap_tax.json";
  {
    std::ofstream out(path);
    out << R"({"leaves": [{"genre": "a", "superclass": "x"}, {"genre": "b", "superclass": "x"}]})";
  }
  const auto t = GenreTaxonomy::from_file(path);
  CHECK(t.leaves() == std::vector<GenreId>{"a", "b"});
  CHECK(t.index_of("b") == 1);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(GenreTaxonomy({{"a", "x"}, {"a", "y"}}), Error);
}

TEST_CASE("vocabulary breaks count ties lexicographically") {
  std::vector<Volume> corpus = {make_volume({{"a a b"}}), make_volume({{"a c"}})};
  CHECK(build_vocabulary(corpus, 2).features() == std::vector<std::string>{"a", "b"});
  CHECK(build_vocabulary(corpus, 10).features() == std::vector<std::string>{"a", "b", "c"});
  std::vector<Volume> empty = {make_volume({{"", " ,"}})};
  CHECK_THROWS_WITH_AS(build_vocabulary(empty, 5), "empty corpus", Error);
}

TEST_CASE("vocabulary matches a count-and-sort oracle and ignores volume order") {
  Rng rng(11);
  std::vector<std::string> words;
  for (char c = 'a'; c <= 'z'; ++c) words.push_back(std::string(1, c) + "w");
  std::vector<double> weights;
  for (std::size_t i = 0; i < words.size(); ++i) weights.push_back(1.0 / static_cast<double>(i + 1));
  std::vector<Volume> corpus;
  std::vector<std::string> all_tokens;
  for (int v = 0; v < 12; ++v) {
    std::vector<std::vector<std::string>> pages;
    for (int p = 0; p < 3; ++p) {
      std::string line;
      for (int k = 0; k < 40; ++k) {
        const auto& w = words[rng.categorical(weights)];
        line += w + " ";
        all_tokens.push_back(w);
      }
      pages.push_back({line});
    }
    corpus.push_back(make_volume(pages));
  }
  for (std::size_t n : {1u, 5u, 20u, 40u}) {
    const auto vocab = build_vocabulary(corpus, n);
    CHECK(vocab.features() == oracle::top_by_count(all_tokens, n));
    auto shuffled = corpus;
    rng.shuffle(shuffled);
    CHECK(build_vocabulary(shuffled, n).features() == vocab.features());
  }
}

TEST_CASE("page features follow the definitions") {
  const Vocabulary vocab({"the", "ship", "#arabic-number"});
  const auto v = make_volume({{"The ship", "the sea"}, {"Ship 12", "", "ship"}, {}});
  SUBCASE("word frequencies and length") {
    const auto f0 = extract_page_features(v, 0, vocab);
    CHECK(f0.word_freqs == std::vector<double>{0.5, 0.25, 0.0});
    // Mean token count over pages is (4 + 3 + 0) / 3.
    CHECK(f0.rel_length == doctest::Approx(4.0 / (7.0 / 3.0)));
    CHECK(f0.rel_position == 0.0);
    CHECK(f0.capline_density == 0.5);
    const auto f1 = extract_page_features(v, 1, vocab);
    CHECK(f1.word_freqs[1] == doctest::Approx(2.0 / 3.0));
    CHECK(f1.word_freqs[2] == doctest::Approx(1.0 / 3.0));
    CHECK(f1.rel_position == 0.5);
    CHECK(f1.capline_density == doctest::Approx(0.5));
  }
  SUBCASE("zero-token page") {
    const auto f2 = extract_page_features(v, 2, vocab);
    CHECK(f2.word_freqs == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(f2.rel_length == 0.0);
    CHECK(f2.rel_position == 1.0);
    CHECK(f2.capline_density == 0.0);
  }
  SUBCASE("out of range") { CHECK_THROWS_AS(extract_page_features(v, 3, vocab), Error); }
}

TEST_CASE("single-page volumes and capitalization density") {
  const Vocabulary vocab({"a"});
  const auto one = make_volume({{"A b c"}});
  const auto f = extract_page_features(one, 0, vocab);
  CHECK(f.rel_position == 0.0);
  CHECK(f.rel_length == 1.0);
  std::vector<std::string> lines = {"Alpha", "", "Beta", "\"Gamma", "", "Delta", "Eps", "", "Zeta", "Eta"};
  CHECK(capline_density(lines) == 1.0);
  CHECK(capline_density({"alpha", "Beta", "12 gamma", "42 Delta"}) == 0.5);
  CHECK(capline_density({"", "  "}) == 0.0);
}

TEST_CASE("word frequencies sum to the in-vocabulary share and positions are monotone") {
  Rng rng(3);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
  std::vector<std::vector<std::string>> pages;
  for (int p = 0; p < 9; ++p) {
    std::vector<std::string> lines;
    for (int l = 0; l < 3; ++l) {
      std::string line;
      for (int k = 0; k < rng.uniform_int(0, 6); ++k) line += words[static_cast<std::size_t>(rng.uniform_int(0, 5))] + " ";
      lines.push_back(line);
    }
    pages.push_back(lines);
  }
  const auto v = make_volume(pages);
  const Vocabulary vocab({"a", "c", "e"});
  const auto fvs = extract_volume_page_features(v, vocab);
  double last = -1.0;
  for (std::size_t p = 0; p < fvs.size(); ++p) {
    double sum = 0.0;
    for (double x : fvs[p].word_freqs) sum += x;
    std::size_t in_vocab = 0;
    for (const auto& t : v.pages[p].tokens()) in_vocab += vocab.index_of(t) >= 0;
    const double expected = v.pages[p].token_count() ? static_cast<double>(in_vocab) / static_cast<double>(v.pages[p].token_count()) : 0.0;
    CHECK(sum == doctest::Approx(expected));
    CHECK(sum <= 1.0 + 1e-12);
    CHECK(fvs[p].rel_position >= last);
    last = fvs[p].rel_position;
  }
  CHECK(last == 1.0);
}

TEST_CASE("word counts and dense vectors") {
  const Vocabulary vocab({"x", "y"});
  const auto v = make_volume({{"x x y z"}});
  const auto f = extract_page_features(v, 0, vocab);
  CHECK(f.word_counts() == std::vector<double>{2.0, 1.0});
  CHECK(f.dense().size() == vocab.size() + kStructuralFeatureCount);
  const auto names = dense_feature_names(vocab);
  CHECK(names.size() == f.dense().size());
  CHECK(vocabulary_from_dense_names(names).features() == vocab.features());
  CHECK(majority_label(make_volume({{"a"}, {"b"}, {"c"}}, 1800, std::vector<GenreId>{"poetry", "drama", "drama"})) == "drama");
  CHECK(majority_label(make_volume({{"a"}, {"b"}}, 1800, std::vector<GenreId>{"poetry", "drama"})) == "drama");
}

TEST_CASE("volume loading reports line numbers and fields") {
  const std::string good =
      R"({"volume_id": "a", "year": 1799, "pages": [{"lines": ["One", "two"]}, {"lines": []}], "labels": ["fiction", "index"]})"
      "\n\n"
      R"({"volume_id": "b", "year": 1850, "pages": [{"lines": ["Three"]}]})"
      "\n";
  const auto vols = parse_volumes(good, GenreTaxonomy::default_taxonomy());
  REQUIRE(vols.size() == 2);
  CHECK(vols[0].volume_id == "a");
  CHECK(vols[0].pages.size() == 2);
  CHECK(vols[0].gold_labels->at(1) == "index");
  CHECK_FALSE(vols[1].gold_labels.has_value());

  CHECK(contents_error(R"({"volume_id": "a", "pages": [{"lines": ["x"]}]})") == "line 1: missing field: year");
  CHECK(contents_error("\n" R"({"volume_id": "a", "year": 1700, "pages": [{"lines": ["x"]}], "labels": ["fictionn"]})") ==
        "line 2: unknown genre: fictionn");
  CHECK(contents_error(R"({"volume_id": "a", "year": 1500, "pages": [{"lines": ["x"]}]})").find("year") != std::string::npos);
  CHECK(contents_error(R"({"volume_id": "a", "year": 1700, "pages": []})").find("pages") != std::string::npos);
  CHECK(contents_error(R"({"volume_id": "a", "year": 1700, "pages": [{"lines": ["x"]}], "labels": []})").find("labels") != std::string::npos);
  CHECK(contents_error("{oops").find("line 1") != std::string::npos);
}

TEST_CASE("corpus and vocabulary files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "genremap_corpus_rt";
  std::filesystem::create_directories(dir);
  std::vector<Volume> vols = {make_volume({{"Sing, O Muse", ""}, {"the 1719 ſhip"}}, 1719, std::vector<GenreId>{"poetry", "fiction"})};
  save_volumes(dir / "c.jsonl", vols);
  const auto back = load_volumes(dir / "c.jsonl", GenreTaxonomy::default_taxonomy());
  REQUIRE(back.size() == 1);
  CHECK(back[0].pages[0].lines() == vols[0].pages[0].lines());
  CHECK(back[0].pages[1].tokens() == vols[0].pages[1].tokens());
  CHECK(*back[0].gold_labels == *vols[0].gold_labels);
  CHECK(volume_to_json_line(back[0]) == volume_to_json_line(vols[0]));

  const Vocabulary vocab({"#roman-numeral", "the", "ship"});
  save_vocabulary(dir / "v.json", vocab);
  CHECK(load_vocabulary(dir / "v.json").features() == vocab.features());
  std::filesystem::remove_all(dir);
}
