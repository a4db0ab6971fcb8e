#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ttscorpus {

/// Mono PCM audio. Samples are finite and within [-1, 1]; the constructor
/// rejects anything else so every downstream stage can rely on it.
class AudioBuffer {
 public:
  AudioBuffer(std::vector<float> samples, int sample_rate_hz);

  std::span<const float> samples() const { return samples_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }
  /// Duration floored to whole milliseconds.
  std::int64_t duration_ms() const {
    return static_cast<std::int64_t>(samples_.size()) * 1000 / sample_rate_hz_;
  }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  std::vector<float> samples_;
  int sample_rate_hz_;
};

/// Half-open interval [start, end) into a source recording, held in integer
/// milliseconds so that 0.1 s boundary arithmetic is exact.
class TimeSpan {
 public:
  static TimeSpan from_ms(std::int64_t start_ms, std::int64_t end_ms);
  /// Rounds both ends to the nearest millisecond.
  static TimeSpan from_seconds(double start_s, double end_s);

  std::int64_t start_ms() const { return start_ms_; }
  std::int64_t end_ms() const { return end_ms_; }
  std::int64_t duration_ms() const { return end_ms_ - start_ms_; }
  double start_s() const { return start_ms_ / 1000.0; }
  double end_s() const { return end_ms_ / 1000.0; }
  double duration_s() const { return duration_ms() / 1000.0; }

  bool contains(const TimeSpan& other) const {
    return other.start_ms_ >= start_ms_ && other.end_ms_ <= end_ms_;
  }
  bool overlaps(const TimeSpan& other) const {
    return start_ms_ < other.end_ms_ && other.start_ms_ < end_ms_;
  }

  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;

 private:
  TimeSpan(std::int64_t start_ms, std::int64_t end_ms)
      : start_ms_(start_ms), end_ms_(end_ms) {}
  std::int64_t start_ms_;
  std::int64_t end_ms_;
};

enum class Completeness { unknown, complete, incomplete, rejected };

enum class TextCategory { high, mid, low };
enum class AudioCategory { high, acceptable, low };

/// high: total >= 0.7; mid: 0.5 <= total < 0.7; low otherwise.
TextCategory text_category(double total);
/// high: total > 0.9; acceptable: 0.75 <= total <= 0.9; low otherwise.
AudioCategory audio_category(double total);

std::string_view to_string(Completeness c);
std::string_view to_string(TextCategory c);
std::string_view to_string(AudioCategory c);
Completeness completeness_from_string(std::string_view s);
TextCategory text_category_from_string(std::string_view s);
AudioCategory audio_category_from_string(std::string_view s);

struct TextSubscores {
  double character = 0.0;
  double length = 0.0;
  double repetition = 0.0;
  double phonetic_coverage = 0.0;
  friend bool operator==(const TextSubscores&, const TextSubscores&) = default;
};

struct AudioSubscores {
  double snr = 0.0;
  double dynamic_range = 0.0;
  double spectral = 0.0;
  double mfcc_variance = 0.0;
  double clipping = 0.0;
  double silence = 0.0;
  double music = 0.0;
  double duration = 0.0;
  friend bool operator==(const AudioSubscores&, const AudioSubscores&) = default;
};

struct QualityReport {
  TextSubscores text;
  double text_total = 0.0;
  TextCategory text_category = TextCategory::low;
  AudioSubscores audio;
  double audio_total = 0.0;
  AudioCategory audio_category = AudioCategory::low;
  friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

struct SpeakerAssignment {
  int local_cluster = 0;
  double confidence = 0.0;
  std::optional<int> global_id;
  friend bool operator==(const SpeakerAssignment&, const SpeakerAssignment&) = default;
};

struct TrimLog {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  friend bool operator==(const TrimLog&, const TrimLog&) = default;
};

inline constexpr std::int64_t kMaxTrimMs = 3000;

struct Segment {
  std::string source_id;
  TimeSpan span;
  std::string transcript;
  Completeness completeness = Completeness::unknown;
  std::optional<QualityReport> quality;
  std::optional<SpeakerAssignment> speaker;
  TrimLog trim;
  std::string audio_file;
  std::vector<std::string> flags;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct CorpusStats {
  double total_hours = 0.0;
  std::int64_t segment_count = 0;
  double trimmed_hours = 0.0;
  double pct_trimmed_start = 0.0;
  double pct_trimmed_end = 0.0;
  double mean_segment_duration_s = 0.0;
  std::int64_t unique_words = 0;
  std::int64_t total_tokens = 0;
  std::int64_t speaker_count = 0;
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// `full` lists every complete segment; `tts` is the filtered training subset.
enum class ManifestKind { full, tts };
std::string_view to_string(ManifestKind k);

struct CorpusManifest {
  ManifestKind kind = ManifestKind::full;
  std::vector<Segment> segments;
  CorpusStats stats;
  std::string pipeline_config_hash;
  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

struct TtsFilter {
  double audio_min = 0.8;
  double text_min = 0.5;
};

bool passes_tts_filter(const Segment& segment, const TtsFilter& filter);

/// Returns the first violated invariant, or nullopt.
std::optional<std::string> check_invariants(const Segment& segment);
std::optional<std::string> check_invariants(const CorpusManifest& manifest,
                                            const TtsFilter& filter = {});

}  // namespace ttscorpus
