#pragma once

#include <string>
#include <string_view>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus::quality {

struct TextWeights {
  double character = 0.35;
  double length = 0.25;
  double repetition = 0.20;
  double phonetic_coverage = 0.20;
};

struct IntRange {
  int lo;
  int hi;
};

struct TextQualityConfig {
  TextWeights weights;
  IntRange ideal_words{4, 25};
  IntRange ideal_chars{15, 180};
  /// Base letters counted for coverage; variants are folded onto them first.
  std::u32string inventory = U"ابپتثجچحخدذرزژسشصضطظعغفقکگلمنوهی";
  /// Letters that count as vowels anywhere; heh counts only word-finally.
  std::u32string vowel_letters = U"اوی";
  double coverage_for_full_marks = 0.5;
  double foreign_penalty = 2.0;
  double dominance_allowance = 0.3;

  void validate() const;
};

/// Persian letters (including common Arabic-script variants), ZWNJ,
/// diacritics and Persian, Arabic-Indic or ASCII digits.
bool is_valid_persian_char(char32_t c);

/// Maps Arabic-script letter variants onto the Persian base letter.
char32_t fold_letter_variant(char32_t c);

double character_quality(std::string_view text, const TextQualityConfig& config = {});
double length_quality(std::string_view text, const TextQualityConfig& config = {});
double repetition_score(std::string_view text, const TextQualityConfig& config = {});
double phonetic_coverage(std::string_view text, const TextQualityConfig& config = {});

struct TextScore {
  TextSubscores subscores;
  double total = 0.0;
  TextCategory category = TextCategory::low;
};

/// Never throws on well-formed config; any byte string is accepted.
TextScore score_text(std::string_view text, const TextQualityConfig& config = {});

}  // namespace ttscorpus::quality
