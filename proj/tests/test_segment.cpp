#include <doctest.h>

#include <json.hpp>

#include "genremap/error.hpp"
#include "genremap/rng.hpp"
#include "genremap/segment.hpp"

using namespace genremap;

namespace {

const char* kVerse = "And all the air a solemn stillness holds,";

std::string words_of_length(Rng& rng, std::size_t lo, std::size_t hi, bool capital) {
  static const std::vector<std::string> pool = {"the", "wind", "over", "a", "meadow", "and", "light",
                                                "falls", "upon", "hills", "of", "morning", "sorrow"};
  const auto target = static_cast<std::size_t>(rng.uniform_int(static_cast<long>(lo), static_cast<long>(hi)));
  std::string line;
  while (line.size() < target) {
    if (!line.empty()) line += ' ';
    line += pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(pool.size()) - 1))];
  }
  line.resize(target);
  while (!line.empty() && line.back() == ' ') line.pop_back();
  if (capital) line[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(line[0])));
  return line;
}

}  // namespace

TEST_CASE("the line rule on single examples") {
  const std::vector<std::string> verse_window(5, kVerse);
  const auto v = classify_line(kVerse, verse_window);
  CHECK(v.label == LineLabel::kVerse);
  CHECK(v.length_chars == 41);
  CHECK(v.starts_capitalized);

  const std::string long_line(120, 'x');
  CHECK(classify_line(long_line, std::vector<std::string>(5, long_line)).label == LineLabel::kProse);

  const std::string prose =
      "which was the reason that I went down to the shore every morning and looked for it";
  const std::vector<std::string> window = {prose, prose, kVerse, prose, prose};
  CHECK(classify_line(kVerse, window).label == LineLabel::kProse);

  CHECK(std::string(line_label_name(LineLabel::kVerse)) == "verse");
}

TEST_CASE("empty lines inherit and whitespace is ignored") {
  const std::vector<std::string> lines = {kVerse, kVerse, "", kVerse, "   ", kVerse};
  const auto c = classify_lines(lines);
  for (const auto& l : c) CHECK(l.label == LineLabel::kVerse);

  const std::vector<std::string> padded = {std::string(kVerse) + "   ", std::string(kVerse) + "\t",
                                           "", std::string(kVerse) + " ", "   ", kVerse};
  const auto p = classify_lines(padded);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(p[i].label == c[i].label);
    CHECK(p[i].length_chars == c[i].length_chars);
  }
  const std::vector<std::string> leading_blank = {"", "lowercase prose line that goes on"};
  CHECK(classify_lines(leading_blank)[0].label == LineLabel::kProse);
}

TEST_CASE("generated verse and prose pages are separated line by line") {
  Rng rng(40);
  std::size_t right = 0, total = 0;
  for (int page = 0; page < 60; ++page) {
    std::vector<std::string> lines;
    std::vector<LineLabel> truth;
    const int blocks = static_cast<int>(rng.uniform_int(1, 3));
    for (int b = 0; b < blocks; ++b) {
      const bool verse = rng.bernoulli(0.5);
      const int n = static_cast<int>(rng.uniform_int(8, 16));
      for (int i = 0; i < n; ++i) {
        const bool paragraph_start = i == 0 || rng.bernoulli(0.15);
        lines.push_back(verse ? words_of_length(rng, 20, 50, true)
                              : words_of_length(rng, 70, 90, !verse && paragraph_start));
        truth.push_back(verse ? LineLabel::kVerse : LineLabel::kProse);
      }
    }
    const auto c = classify_lines(lines);
    for (std::size_t i = 0; i < c.size(); ++i) {
      right += c[i].label == truth[i];
      ++total;
    }
  }
  CHECK(static_cast<double>(right) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("era gate") {
  CHECK(line_rule_applies(1850));
  CHECK(line_rule_applies(1899));
  CHECK_FALSE(line_rule_applies(1900));
  LineRuleParams p;
  p.last_year = 1950;
  CHECK(line_rule_applies(1920, p));
}

TEST_CASE("page ranges") {
  const auto one = extract_page_ranges(std::vector<GenreId>{"F", "F", "F"});
  REQUIRE(one.size() == 1);
  CHECK(one[0].genre == "F");
  CHECK(one[0].start_page == 0);
  CHECK(one[0].end_page == 2);

  const auto r = extract_page_ranges(std::vector<GenreId>{"T", "F", "F", "I"});
  REQUIRE(r.size() == 3);
  CHECK((r[0].genre == "T" && r[0].start_page == 0 && r[0].end_page == 0));
  CHECK((r[1].genre == "F" && r[1].start_page == 1 && r[1].end_page == 2));
  CHECK((r[2].genre == "I" && r[2].start_page == 3 && r[2].end_page == 3));

  const auto j = nlohmann::json::parse(ranges_to_json_line("v1", r));
  CHECK(j["volume_id"] == "v1");
  CHECK(j["ranges"][1]["start"] == 1);
  CHECK(j["ranges"][1]["end"] == 2);

  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GenreId> labels;
    const int n = static_cast<int>(rng.uniform_int(1, 30));
    for (int i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + rng.uniform_int(0, 2))));
    const auto ranges = extract_page_ranges(labels);
    CHECK(expand_page_ranges(ranges) == labels);
    for (std::size_t i = 1; i < ranges.size(); ++i) CHECK(ranges[i].genre != ranges[i - 1].genre);
  }
  CHECK_THROWS_AS(extract_page_ranges(std::vector<GenreId>{}), Error);
}
