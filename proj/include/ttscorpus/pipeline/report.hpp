#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/speaker/diarization.hpp"

namespace ttscorpus::pipeline {

struct RunReport {
  CorpusStats before;  ///< full manifest
  CorpusStats after;   ///< TTS subset
  std::optional<speaker::ConsistencyReport> consistency;
  std::size_t recordings = 0;
  std::size_t failed_recordings = 0;
  std::size_t candidates = 0;
  std::size_t rejected_segments = 0;
  std::map<std::string, std::size_t> rejections_by_cause;
};

nlohmann::json report_to_json(const RunReport& report);
/// Two-column table (before / after filtering) plus run counters. The
/// consistency row reads "n/a" without narrator metadata.
std::string render_report_text(const RunReport& report);

/// Single-manifest summary for the `stats` command.
std::string render_stats_text(const CorpusStats& stats);

}  // namespace ttscorpus::pipeline
