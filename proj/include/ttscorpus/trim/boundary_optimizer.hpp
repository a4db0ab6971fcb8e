#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::trim {

struct TrimSearchConfig {
  double initial_trim_s = 3.0;
  double fine_step_s = 0.1;
  double stability_threshold = 0.05;
  int max_binary_iterations = 8;

  void validate() const;
  std::int64_t fine_step_ms() const;
  /// initial_trim_s expressed in fine steps, floored
  int initial_steps() const;
};

/// Word-level Levenshtein distance between the comparison forms of `a` and
/// `b`, divided by the longer word count. Two empty texts have distance 0.
double normalized_word_distance(std::string_view a, std::string_view b);

/// normalized_word_distance(a, b) <= threshold
bool transcription_stable(std::string_view a, std::string_view b, double threshold);

enum class Side { start, end };
std::string_view to_string(Side s);

struct BoundaryResult {
  std::int64_t trim_ms = 0;
  int asr_calls = 0;
  bool asr_failed = false;
};

/// Largest trim on `side`, in whole fine steps, whose re-transcription stays
/// stable against `reference`. Probes the initial trim first, then halves
/// the bracket, then walks it in fine steps. The span keeps at least one
/// fine step of audio.
BoundaryResult optimize_boundary(const AudioBuffer& source, std::string_view source_id,
                                 const TimeSpan& span, std::string_view reference, Side side,
                                 providers::AsrProvider& asr, const TrimSearchConfig& config = {});

struct TrimResult {
  TimeSpan optimized_span;
  std::int64_t start_trim_ms = 0;
  std::int64_t end_trim_ms = 0;
  int asr_calls = 0;
  std::string final_transcript;
  std::vector<std::string> flags;

  double start_trim_s() const { return start_trim_ms / 1000.0; }
  double end_trim_s() const { return end_trim_ms / 1000.0; }
};

/// Start side, then end side on the already start-trimmed span, then one
/// re-transcription of the final span. Requires a complete segment.
TrimResult optimize_segment(const AudioBuffer& source, const Segment& segment,
                            providers::AsrProvider& asr, const TrimSearchConfig& config = {});

/// Copies the result into a segment: span, transcript, trim log and flags.
void apply_trim(Segment& segment, const TrimResult& result);

}  // namespace ttscorpus::trim
