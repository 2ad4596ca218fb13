#include <json.hpp>

#include "genremap/error.hpp"
#include "genremap/segment.hpp"

namespace genremap {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool passes(const LineClass& m, const LineRuleParams& p) {
  return m.length_chars > 0 && m.length_chars < p.max_chars && m.starts_capitalized;
}

}  // namespace

const char* line_label_name(LineLabel label) { return label == LineLabel::kVerse ? "verse" : "prose"; }

LineClass measure_line(std::string_view line) {
  const std::string_view t = trim(line);
  LineClass c;
  for (char ch : t)
    if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++c.length_chars;
  c.starts_capitalized = capline_density({std::string(t)}) > 0.0;
  return c;
}

LineClass classify_line(std::string_view line, const std::vector<std::string>& window,
                        LineLabel previous, const LineRuleParams& params) {
  LineClass c = measure_line(line);
  if (c.length_chars == 0) {
    c.label = previous;
    return c;
  }
  std::size_t nonempty = 0, votes = 0;
  for (const auto& w : window) {
    const LineClass m = measure_line(w);
    if (m.length_chars == 0) continue;
    ++nonempty;
    if (passes(m, params)) ++votes;
  }
  c.label = passes(c, params) && 2 * votes > nonempty ? LineLabel::kVerse : LineLabel::kProse;
  return c;
}

std::vector<LineClass> classify_lines(const std::vector<std::string>& lines,
                                      const LineRuleParams& params) {
  std::vector<std::size_t> nonempty;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (!trim(lines[i]).empty()) nonempty.push_back(i);

  std::vector<LineClass> out(lines.size());
  const std::size_t half = params.window / 2;
  LineLabel previous = LineLabel::kProse;
  std::size_t k = 0;  // position of line i among non-empty lines
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (k < nonempty.size() && nonempty[k] == i) {
      // Centred window over non-empty lines, clipped at the page edges.
      const std::size_t lo = k >= half ? k - half : 0;
      const std::size_t hi = std::min(nonempty.size(), k + (params.window - half));
      std::vector<std::string> window;
      for (std::size_t w = lo; w < hi; ++w) window.push_back(lines[nonempty[w]]);
      out[i] = classify_line(lines[i], window, previous, params);
      ++k;
    } else {
      out[i] = classify_line(lines[i], {}, previous, params);
    }
    previous = out[i].label;
  }
  return out;
}

bool line_rule_applies(int year, const LineRuleParams& params) { return year <= params.last_year; }

std::vector<PageRange> extract_page_ranges(const std::vector<GenreId>& labels) {
  if (labels.empty()) throw Error("cannot extract ranges from an empty volume");
  std::vector<PageRange> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!out.empty() && out.back().genre == labels[i])
      out.back().end_page = i;
    else
      out.push_back({labels[i], i, i});
  }
  return out;
}

std::vector<PageRange> extract_page_ranges(const DecodedVolume& decoded) {
  return extract_page_ranges(decoded.labels);
}

std::vector<GenreId> expand_page_ranges(const std::vector<PageRange>& ranges) {
  std::vector<GenreId> out;
  for (const auto& r : ranges)
    for (std::size_t i = r.start_page; i <= r.end_page; ++i) out.push_back(r.genre);
  return out;
}

std::string ranges_to_json_line(const std::string& volume_id, const std::vector<PageRange>& ranges) {
  nlohmann::ordered_json j;
  j["volume_id"] = volume_id;
  j["ranges"] = nlohmann::json::array();
  for (const auto& r : ranges) {
    nlohmann::ordered_json jr;
    jr["genre"] = r.genre;
    jr["start"] = r.start_page;
    jr["end"] = r.end_page;
    j["ranges"].push_back(std::move(jr));
  }
  return j.dump();
}

}  // namespace genremap
