#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synth.hpp"

namespace ttscorpus::fixtures {

struct CorpusBook {
  std::string stem;
  std::vector<std::string> narrators;  ///< written to <stem>.meta.json; empty = no metadata
  BookOptions options;
};

/// Three short books: two read by narrator_a, one by narrator_b with a guest
/// speaker on every fourth sentence.
std::vector<CorpusBook> default_corpus(std::uint64_t seed = 7);

/// Writes <stem>.wav, <stem>.script.json and <stem>.meta.json per book.
void write_corpus(const std::filesystem::path& dir, const std::vector<CorpusBook>& books);

/// A config for `input` -> `output` in mock mode, as JSON text.
std::string mock_config_json(const std::filesystem::path& input, const std::filesystem::path& output,
                             int workers = 1, std::uint64_t seed = 0);

}  // namespace ttscorpus::fixtures
