#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus::providers {

/// Failure of an inference backend. `retryable` separates transient
/// unavailability (overload, network) from permanent rejection of the input.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, bool retryable)
      : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

struct Transcription {
  std::string text;  ///< NFC
  std::optional<double> confidence;
  friend bool operator==(const Transcription&, const Transcription&) = default;
};

struct CompletenessVerdict {
  bool is_complete = false;
  double score = 0.0;
  friend bool operator==(const CompletenessVerdict&, const CompletenessVerdict&) = default;
};

inline constexpr double kCompletenessCut = 0.5;

/// Builds a verdict consistent with is_complete <=> score >= 0.5.
CompletenessVerdict verdict_from_score(double score);

class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }
  double norm() const { return norm_; }
  bool valid() const { return !values_.empty() && norm_ > 0.0; }
  Embedding normalized() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
  double norm_ = 0.0;
};

double cosine_similarity(const Embedding& a, const Embedding& b);

enum class MusicKind { music, speech, noise };
std::string_view to_string(MusicKind k);
MusicKind music_kind_from_string(std::string_view s);

struct MusicSpan {
  TimeSpan span;  ///< relative to the start of the analysed audio
  MusicKind kind = MusicKind::music;
  friend bool operator==(const MusicSpan&, const MusicSpan&) = default;
};

/// Where a clip came from. Remote backends only see the audio; scripted
/// mocks use the provenance to answer deterministically.
struct ClipInfo {
  std::string source_id;
  TimeSpan span;
};

class AsrProvider {
 public:
  virtual ~AsrProvider() = default;
  virtual Transcription transcribe(const AudioBuffer& audio, const ClipInfo& clip) = 0;
};

class CompletenessProvider {
 public:
  virtual ~CompletenessProvider() = default;
  virtual CompletenessVerdict check_completeness(std::string_view text) = 0;
};

class PunctuationProvider {
 public:
  virtual ~PunctuationProvider() = default;
  virtual std::string restore_punctuation(std::string_view text) = 0;
};

class SpeakerEmbeddingProvider {
 public:
  virtual ~SpeakerEmbeddingProvider() = default;
  virtual Embedding embed_speaker(const AudioBuffer& audio, const ClipInfo& clip) = 0;
};

class MusicProvider {
 public:
  virtual ~MusicProvider() = default;
  virtual std::vector<MusicSpan> detect_music(const AudioBuffer& audio) = 0;
};

struct ProviderSet {
  std::shared_ptr<AsrProvider> asr;
  std::shared_ptr<CompletenessProvider> completeness;
  std::shared_ptr<PunctuationProvider> punctuation;
  std::shared_ptr<SpeakerEmbeddingProvider> embedder;
  std::shared_ptr<MusicProvider> music;
};

}  // namespace ttscorpus::providers
