#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/pipeline/checkpoint.hpp"
#include "ttscorpus/pipeline/config.hpp"
#include "ttscorpus/pipeline/report.hpp"
#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::pipeline {

struct InputRecording {
  std::string recording_id;  ///< sanitized, unique
  std::filesystem::path path;
  std::string relative;      ///< generic path relative to input_dir
};

/// Every *.wav below the directory, sorted by relative path. Throws
/// ConfigError if the directory is missing or holds no recordings.
std::vector<InputRecording> discover_recordings(const std::filesystem::path& input_dir);

/// Bytes outside [A-Za-z0-9_-] become '_'.
std::string sanitize_id(std::string_view name);

/// Builds providers for the configured mode. Mock mode reads
/// <stem>.script.json beside each recording.
providers::ProviderSet make_providers(const PipelineConfig& config,
                                      const std::vector<InputRecording>& recordings);

struct RunOptions {
  /// Reuse checkpoints written under the same config hash.
  bool resume = false;
  /// Return after every recording reached this stage, before any output.
  std::optional<Stage> stop_after;
  /// Replaces make_providers (tests inject counting mocks).
  std::optional<providers::ProviderSet> providers;
};

struct RunResult {
  CorpusManifest full;
  CorpusManifest tts;
  RunReport report;
  bool interrupted = false;
  std::vector<std::string> errors;  ///< one per failed recording

  /// 0 success, 2 when every recording failed.
  int exit_code() const;
};

/// Runs all stages and writes manifest.jsonl, manifest_tts.jsonl,
/// stats.json, stats.txt, wavs/ and checkpoints/ under output_dir.
/// ConfigError escapes before any processing; per-recording failures are
/// logged and skipped.
RunResult run(const PipelineConfig& config, const RunOptions& options = {});

/// Per-file metadata (<stem>.meta.json): {"narrators": [...], "title": ...}.
std::vector<std::string> read_narrators(const std::filesystem::path& recording);

}  // namespace ttscorpus::pipeline
