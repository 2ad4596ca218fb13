#include <array>
#include <fstream>
#include <regex>

#include "genremap/corpus.hpp"
#include "genremap/error.hpp"

namespace genremap {
namespace {

constexpr char32_t kLongS = 0x017F;
constexpr char32_t kRightQuote = 0x2019;

struct Decoded {
  char32_t cp;
  std::size_t len;
};

// Lenient UTF-8 decoding; invalid bytes decode as U+FFFD of length 1.
Decoded decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F);
  };
  if ((b0 & 0xE0) == 0xC0 && cont(1))
    return {(static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
    return {(static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
    return {(static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) |
                bits(3),
            4};
  return {0xFFFD, 1};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_alpha(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  // Latin-1 supplement and Latin Extended-A/B letters.
  return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

bool is_upper(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7);
}

char32_t to_lower(char32_t cp) {
  if (cp == kLongS) return 's';
  if (is_upper(cp)) return cp + 0x20;
  return cp;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == kRightQuote; }

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

constexpr std::array<std::string_view, 3> kCompressed = {kPersonalName, kRomanNumeral,
                                                         kArabicNumber};

}  // namespace

bool is_roman_numeral(std::string_view word) {
  static const std::regex kRoman(
      "m{0,3}(cm|cd|d?c{0,3})(xc|xl|l?x{0,3})(ix|iv|v?i{0,3})", std::regex::icase);
  if (word.size() < 2) return false;
  for (char ch : word) {
    switch (ch) {
      case 'i': case 'v': case 'x': case 'l': case 'c': case 'd': case 'm':
      case 'I': case 'V': case 'X': case 'L': case 'C': case 'D': case 'M':
        break;
      default:
        return false;
    }
  }
  return std::regex_match(word.begin(), word.end(), kRoman);
}

std::vector<std::string> default_name_lexicon() {
  return {"adam",    "alice",   "amelia",  "ann",     "anne",     "arthur",  "catherine",
          "charles", "charlotte", "clarissa", "edward", "eliza",   "elizabeth", "emily",
          "emma",    "fanny",   "frank",   "george",  "harriet",  "harry",   "henry",
          "jack",    "james",   "jane",    "john",    "joseph",   "julia",   "lucy",
          "margaret", "maria",  "mary",    "matilda", "pamela",   "peter",   "richard",
          "robert",  "robinson", "sarah",  "sophia",  "thomas",   "tom",     "walter",
          "william"};
}

Tokenizer::Tokenizer() {
  for (auto& n : default_name_lexicon()) names_.insert(std::move(n));
}

Tokenizer::Tokenizer(std::unordered_set<std::string> name_lexicon) {
  for (const auto& n : name_lexicon) {
    auto toks = Tokenizer(std::unordered_set<std::string>{}, 0).tokenize(n);
    if (toks.size() == 1) names_.insert(toks.front());
  }
}

Tokenizer::Tokenizer(std::unordered_set<std::string> name_lexicon, int)
    : names_(std::move(name_lexicon)) {}

Tokenizer Tokenizer::from_lexicon_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open name lexicon: " + path.string());
  std::unordered_set<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) names.insert(line);
  }
  return Tokenizer(std::move(names));
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const Decoded d = decode(text, i);

    if (d.cp == '#') {
      bool matched = false;
      for (auto name : kCompressed) {
        if (text.substr(i, name.size()) != name) continue;
        const std::size_t end = i + name.size();
        if (end < text.size() && (is_alpha(decode(text, end).cp) || text[end] == '-')) continue;
        out.emplace_back(name);
        i = end;
        matched = true;
        break;
      }
      if (!matched) i += d.len;
      continue;
    }

    if (is_digit(d.cp)) {
      while (i < text.size() && is_digit(static_cast<unsigned char>(text[i]))) ++i;
      out.emplace_back(kArabicNumber);
      continue;
    }

    if (!is_alpha(d.cp) && d.cp != kLongS) {
      i += d.len;
      continue;
    }

    // Word: letters with apostrophes allowed only between letters.
    const bool capitalized = is_upper(d.cp);
    std::string word;
    std::size_t j = i;
    while (j < text.size()) {
      const Decoded c = decode(text, j);
      if (is_alpha(c.cp) || c.cp == kLongS) {
        encode(to_lower(c.cp), word);
        j += c.len;
        continue;
      }
      if (is_apostrophe(c.cp) && j + c.len < text.size()) {
        const Decoded next = decode(text, j + c.len);
        if (is_alpha(next.cp) || next.cp == kLongS) {
          word.push_back('\'');
          j += c.len;
          continue;
        }
      }
      break;
    }
    i = j;

    if (is_roman_numeral(word)) {
      out.emplace_back(kRomanNumeral);
    } else if (capitalized && names_.count(word) > 0) {
      out.emplace_back(kPersonalName);
    } else {
      out.push_back(std::move(word));
    }
  }
  return out;
}

std::size_t Tokenizer::count_tokens(std::string_view text) const { return tokenize(text).size(); }

std::vector<std::string> tokenize(std::string_view text) {
  static const Tokenizer kDefault;
  return kDefault.tokenize(text);
}

}  // namespace genremap
