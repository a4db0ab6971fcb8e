#include "ttscorpus/quality/text_quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::quality {

void TextQualityConfig::validate() const {
  const double sum = weights.character + weights.length + weights.repetition +
                     weights.phonetic_coverage;
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("text weights must sum to 1");
  for (double w : {weights.character, weights.length, weights.repetition, weights.phonetic_coverage}) {
    if (w < 0.0) throw std::invalid_argument("text weights must be non-negative");
  }
  if (ideal_words.lo < 1 || ideal_words.hi < ideal_words.lo) {
    throw std::invalid_argument("ideal word range is empty");
  }
  if (ideal_chars.lo < 1 || ideal_chars.hi < ideal_chars.lo) {
    throw std::invalid_argument("ideal char range is empty");
  }
  if (inventory.empty()) throw std::invalid_argument("phoneme inventory is empty");
  if (!(coverage_for_full_marks > 0.0 && coverage_for_full_marks <= 1.0)) {
    throw std::invalid_argument("coverage_for_full_marks must be in (0, 1]");
  }
}

char32_t fold_letter_variant(char32_t c) {
  switch (c) {
    case U'آ':
    case U'أ':
    case U'إ':
    case U'ٱ':
      return U'ا';
    case U'ي':
    case U'ى':
    case U'ئ':
      return U'ی';
    case U'ك':
      return U'ک';
    case U'ة':
    case U'ۀ':
      return U'ه';
    case U'ؤ':
      return U'و';
    default:
      return c;
  }
}

bool is_valid_persian_char(char32_t c) {
  if (c >= U'0' && c <= U'9') return true;
  if (c >= 0x06F0 && c <= 0x06F9) return true;  // Persian digits
  if (c >= 0x0660 && c <= 0x0669) return true;  // Arabic-Indic digits
  if (c == 0x200C) return true;                 // ZWNJ
  if (c >= 0x064B && c <= 0x0652) return true;  // harakat
  if (c == 0x0670 || c == 0x0654) return true;
  if (c == U'ء') return true;
  static const std::u32string base = U"ابپتثجچحخدذرزژسشصضطظعغفقکگلمنوهی";
  const char32_t folded = fold_letter_variant(c);
  return base.find(folded) != std::u32string::npos;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double range_score(double x, const IntRange& r) {
  const double lo = r.lo;
  const double hi = r.hi;
  if (x >= lo && x <= hi) return 1.0;
  if (x < lo) return clamp01((x - 0.25 * lo) / (0.75 * lo));
  return clamp01((3.0 * hi - x) / (2.0 * hi));
}

}  // namespace

double character_quality(std::string_view text, const TextQualityConfig& config) {
  std::size_t counted = 0;
  std::size_t valid = 0;
  std::size_t foreign = 0;
  for (char32_t c : text::to_code_points(text::nfc(text))) {
    if (text::is_whitespace(c)) continue;
    ++counted;
    if (is_valid_persian_char(c) || text::is_punctuation(c)) {
      ++valid;
    } else if (text::is_letter(c)) {
      ++foreign;
    }
  }
  if (counted == 0) return 0.0;
  const double n = static_cast<double>(counted);
  const double penalty = std::max(0.0, 1.0 - config.foreign_penalty * (foreign / n));
  return clamp01(valid / n * penalty);
}

double length_quality(std::string_view text, const TextQualityConfig& config) {
  const auto tokens = text::whitespace_tokens(text);
  if (tokens.empty()) return 0.0;
  std::size_t chars = tokens.size() - 1;  // one space between tokens
  for (const auto& t : tokens) chars += text::to_code_points(t).size();
  return std::min(range_score(static_cast<double>(tokens.size()), config.ideal_words),
                  range_score(static_cast<double>(chars), config.ideal_chars));
}

double repetition_score(std::string_view text, const TextQualityConfig& config) {
  const auto words = text::comparison_words(text);
  if (words.size() <= 3) return 1.0;
  std::map<std::string, int> counts;
  int top = 0;
  for (const auto& w : words) top = std::max(top, ++counts[w]);
  const double total = static_cast<double>(words.size());
  const double ttr = static_cast<double>(counts.size()) / total;
  const double cap = 1.0 - std::max(0.0, top / total - config.dominance_allowance);
  return clamp01(std::min(ttr, cap));
}

double phonetic_coverage(std::string_view text, const TextQualityConfig& config) {
  std::set<char32_t> present;
  bool vowel = false;
  bool consonant = false;
  const auto is_vowel = [&](char32_t c) {
    return config.vowel_letters.find(c) != std::u32string::npos;
  };
  for (const auto& word : text::whitespace_tokens(text)) {
    std::u32string letters;
    for (char32_t c : text::to_code_points(word)) {
      const char32_t f = fold_letter_variant(c);
      if (config.inventory.find(f) != std::u32string::npos) letters.push_back(f);
    }
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const char32_t c = letters[i];
      present.insert(c);
      if (is_vowel(c) || (c == U'ه' && i + 1 == letters.size())) {
        vowel = true;
      } else {
        consonant = true;
      }
    }
  }
  if (present.empty()) return 0.0;
  const double coverage = static_cast<double>(present.size()) / config.inventory.size();
  double score = std::min(1.0, coverage / config.coverage_for_full_marks);
  if (!(vowel && consonant)) score *= 0.5;
  return clamp01(score);
}

TextScore score_text(std::string_view text, const TextQualityConfig& config) {
  TextScore s;
  s.subscores = {character_quality(text, config), length_quality(text, config),
                 repetition_score(text, config), phonetic_coverage(text, config)};
  const auto& w = config.weights;
  s.total = clamp01(w.character * s.subscores.character + w.length * s.subscores.length +
                    w.repetition * s.subscores.repetition +
                    w.phonetic_coverage * s.subscores.phonetic_coverage);
  s.category = text_category(s.total);
  return s;
}

}  // namespace ttscorpus::quality
