#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::pipeline {

enum class Stage { segmented, validated, optimized, scored, labeled, finalized };
std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);

/// Everything known about one recording after the stage it reached.
struct RecordingState {
  std::string recording_id;
  std::string source;  ///< input path relative to input_dir
  std::vector<std::string> narrators;
  Stage stage = Stage::segmented;
  std::vector<TimeSpan> candidates;
  /// One per validation outcome, complete and rejected, in candidate order.
  std::vector<Segment> segments;
  std::vector<std::string> causes;  ///< rejection cause per segment, "" if complete
  std::vector<std::optional<providers::Embedding>> embeddings;
  int k_star = 0;
  std::string cluster_method;
  /// Punctuated transcript for segments in the TTS subset, "" otherwise.
  std::vector<std::string> tts_transcripts;
};

nlohmann::json state_to_json(const RecordingState& state, const std::string& config_hash);
/// Throws std::runtime_error on malformed input.
RecordingState state_from_json(const nlohmann::json& j);

std::filesystem::path checkpoint_path(const std::filesystem::path& output_dir,
                                      const std::string& recording_id);

/// Written to a sibling temporary file, then renamed over the target.
void write_checkpoint(const std::filesystem::path& path, const RecordingState& state,
                      const std::string& config_hash);

/// nullopt when missing, unreadable or written under another config hash.
std::optional<RecordingState> read_checkpoint(const std::filesystem::path& path,
                                              const std::string& config_hash);

/// Atomic whole-file write used for every pipeline output.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ttscorpus::pipeline
