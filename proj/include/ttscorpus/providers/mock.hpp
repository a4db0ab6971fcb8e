#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::providers {

// Deterministic stand-ins for the inference backends. They answer from an
// annotated script of each recording, so tests know the ground truth.

struct ScriptWord {
  TimeSpan span;
  std::string text;
};

struct SpeakerTurn {
  TimeSpan span;
  std::string speaker;
};

struct RecordingScript {
  std::vector<ScriptWord> words;  ///< sorted by start
  std::vector<SpeakerTurn> speakers;
};

/// Scripts keyed by recording id. JSON form of one script:
///   {"words": [{"start_s": 1.0, "end_s": 1.5, "text": "..."}, ...],
///    "speakers": [{"start_s": 0.0, "end_s": 60.0, "speaker": "A"}, ...]}
class ScriptLibrary {
 public:
  void add(std::string source_id, RecordingScript script);
  const RecordingScript* find(std::string_view source_id) const;
  bool empty() const { return scripts_.empty(); }

  static RecordingScript script_from_json(const nlohmann::json& j);
  static nlohmann::json script_to_json(const RecordingScript& script);
  static RecordingScript load_script_file(const std::filesystem::path& path);

 private:
  std::map<std::string, RecordingScript, std::less<>> scripts_;
};

class CallCounted {
 public:
  long calls() const { return calls_.load(); }
  void reset_calls() { calls_ = 0; }

 protected:
  void count() { ++calls_; }

 private:
  std::atomic<long> calls_{0};
};

/// Returns exactly the script words whose intervals lie fully inside the
/// clip span, joined by single spaces.
class ScriptedAsr : public AsrProvider, public CallCounted {
 public:
  explicit ScriptedAsr(std::shared_ptr<const ScriptLibrary> scripts);
  Transcription transcribe(const AudioBuffer& audio, const ClipInfo& clip) override;

 private:
  std::shared_ptr<const ScriptLibrary> scripts_;
};

/// Complete iff the text ends with sentence-final punctuation or its last
/// word (comparison-normalized) is one of the configured final words.
class RuleCompleteness : public CompletenessProvider, public CallCounted {
 public:
  explicit RuleCompleteness(std::set<std::string> final_words = {});
  CompletenessVerdict check_completeness(std::string_view text) override;

 private:
  std::set<std::string> final_words_;
};

bool is_sentence_final_mark(char32_t c);

/// Appends '.' unless the right-trimmed text already ends with a
/// sentence-final mark. Idempotent.
class PeriodPunctuator : public PunctuationProvider, public CallCounted {
 public:
  std::string restore_punctuation(std::string_view text) override;
};

struct SyntheticSpeakerConfig {
  std::size_t dimension = 192;
  double spread = 0.015;  ///< per-dimension stddev around the speaker center
  std::uint64_t seed = 0;
};

/// Unit vectors drawn around a per-speaker center. The speaker of a clip is
/// the script turn overlapping it most; each (speaker, source, span) gets
/// its own reproducible noise draw.
class SyntheticSpeakerEmbedder : public SpeakerEmbeddingProvider, public CallCounted {
 public:
  SyntheticSpeakerEmbedder(std::shared_ptr<const ScriptLibrary> scripts,
                           SyntheticSpeakerConfig config = {});
  Embedding embed_speaker(const AudioBuffer& audio, const ClipInfo& clip) override;

  Embedding center(std::string_view speaker) const;
  Embedding sample(std::string_view speaker, std::uint64_t utterance_key) const;
  std::string speaker_for(const ClipInfo& clip) const;

 private:
  std::shared_ptr<const ScriptLibrary> scripts_;
  SyntheticSpeakerConfig config_;
};

struct FlatnessConfig {
  double window_s = 0.5;
  double flatness_threshold = 0.05;
  double silence_dbfs = -45.0;
  std::size_t fft_size = 1024;
};

/// Flags windows whose averaged power spectrum has spectral flatness below
/// the threshold (tonal, music-like). Quiet windows are never flagged.
class FlatnessMusicDetector : public MusicProvider, public CallCounted {
 public:
  explicit FlatnessMusicDetector(FlatnessConfig config = {});
  std::vector<MusicSpan> detect_music(const AudioBuffer& audio) override;

 private:
  FlatnessConfig config_;
};

/// Geometric over arithmetic mean of the averaged power spectrum (DC bin
/// excluded) over all full FFT frames of `samples`.
double spectral_flatness(std::span<const float> samples, int sample_rate_hz,
                         std::size_t fft_size);

/// Always reports the given spans.
class FixedMusicProvider : public MusicProvider, public CallCounted {
 public:
  explicit FixedMusicProvider(std::vector<MusicSpan> spans) : spans_(std::move(spans)) {}
  std::vector<MusicSpan> detect_music(const AudioBuffer&) override {
    count();
    return spans_;
  }

 private:
  std::vector<MusicSpan> spans_;
};

struct MockProviders {
  std::shared_ptr<ScriptedAsr> asr;
  std::shared_ptr<RuleCompleteness> completeness;
  std::shared_ptr<PeriodPunctuator> punctuation;
  std::shared_ptr<SyntheticSpeakerEmbedder> embedder;
  std::shared_ptr<FlatnessMusicDetector> music;

  ProviderSet as_set() const { return {asr, completeness, punctuation, embedder, music}; }
  long total_calls() const;
  void reset_calls();
};

MockProviders make_mock_providers(std::shared_ptr<const ScriptLibrary> scripts,
                                  SyntheticSpeakerConfig speaker_config = {},
                                  FlatnessConfig music_config = {});

/// 64-bit FNV-1a; stable across platforms, used for seeding.
std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed = 0);

}  // namespace ttscorpus::providers
