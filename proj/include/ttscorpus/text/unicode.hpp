#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ttscorpus::text {

// UTF-8 in, UTF-8 out. Ill-formed input sequences decode to U+FFFD; none of
// these functions throw on arbitrary bytes.

std::string nfc(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view code_points);

bool is_whitespace(char32_t c);
bool is_punctuation(char32_t c);
bool is_letter(char32_t c);
bool is_digit(char32_t c);
bool is_latin_letter(char32_t c);

/// Canonical form used wherever two transcripts are compared: NFC, every
/// punctuation code point removed, whitespace runs collapsed to one ASCII
/// space, case folded to lower, leading/trailing space trimmed.
std::string normalize_for_comparison(std::string_view utf8);

/// Maximal non-whitespace runs of the NFC form.
std::vector<std::string> whitespace_tokens(std::string_view utf8);

/// Words of normalize_for_comparison(utf8).
std::vector<std::string> comparison_words(std::string_view utf8);

}  // namespace ttscorpus::text
