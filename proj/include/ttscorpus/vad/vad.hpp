#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus::vad {

struct VadConfig {
  int aggressiveness = 1;  ///< 0..3, higher is a stricter speech gate
  int frame_ms = 30;       ///< 10, 20 or 30
  int min_silence_ms = 300;
  double min_segment_s = 1.0;
  double max_segment_s = 20.0;
  int padding_ms = 100;

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

enum class FrameLabel : std::uint8_t { non_speech, speech };

/// Per-aggressiveness decision thresholds. A frame is speech when its RMS
/// level reaches `min_level_dbfs` and at least `min_band_ratio` of its
/// spectral energy lies in the 80 Hz - 4 kHz speech band.
struct ThresholdSet {
  double min_level_dbfs;
  double min_band_ratio;
};

ThresholdSet thresholds_for(int aggressiveness);

class UnsupportedRateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Supported rates: 8, 16, 32 and 48 kHz.
std::vector<FrameLabel> classify_frames(const AudioBuffer& buffer, const VadConfig& config);

/// Speech runs merged across pauses shorter than min_silence_ms, over-long
/// runs split, padded and clipped to [0, duration_ms]. No length filter.
std::vector<TimeSpan> spans_from_labels(std::span<const FrameLabel> labels,
                                        std::int64_t duration_ms, const VadConfig& config);

/// spans_from_labels over classify_frames, dropping spans shorter than
/// min_segment_s. Result is sorted and pairwise disjoint.
std::vector<TimeSpan> detect_candidates(const AudioBuffer& buffer, const VadConfig& config);

}  // namespace ttscorpus::vad
