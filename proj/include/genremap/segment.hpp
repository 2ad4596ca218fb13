#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "genremap/corpus.hpp"
#include "genremap/sequence.hpp"

namespace genremap {

enum class LineLabel { kProse, kVerse };
const char* line_label_name(LineLabel label);

struct LineClass {
  LineLabel label = LineLabel::kProse;
  std::size_t length_chars = 0;
  bool starts_capitalized = false;
};

struct LineRuleParams {
  std::size_t max_chars = 60;  // verse lines are strictly shorter
  std::size_t window = 5;      // lines in the majority vote, centred
  int last_year = 1899;        // the rule is applied to volumes up to this year
};

// Trimmed length in code points and whether the first alphabetic character
// is uppercase.
LineClass measure_line(std::string_view line);

// A non-empty line is verse when it is short and capitalized and a strict
// majority of the non-empty lines in its centred window are too. Empty
// lines take the class of the previous line (prose at the start).
std::vector<LineClass> classify_lines(const std::vector<std::string>& lines,
                                      const LineRuleParams& params = {});

// Classifies one line given its window of neighbouring lines (the line itself
// included). `previous` is used when the line is empty.
LineClass classify_line(std::string_view line, const std::vector<std::string>& window,
                        LineLabel previous = LineLabel::kProse, const LineRuleParams& params = {});

bool line_rule_applies(int year, const LineRuleParams& params = {});

struct PageRange {
  GenreId genre;
  std::size_t start_page = 0;
  std::size_t end_page = 0;  // inclusive
};

std::vector<PageRange> extract_page_ranges(const std::vector<GenreId>& labels);
std::vector<PageRange> extract_page_ranges(const DecodedVolume& decoded);
std::vector<GenreId> expand_page_ranges(const std::vector<PageRange>& ranges);

// {"volume_id", "ranges": [{"genre", "start", "end"}]}
std::string ranges_to_json_line(const std::string& volume_id, const std::vector<PageRange>& ranges);

}  // namespace genremap
