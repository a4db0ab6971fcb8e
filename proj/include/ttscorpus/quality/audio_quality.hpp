#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::quality {

/// Linear map with value(at_zero) = 0 and value(at_one) = 1, clamped to
/// [0, 1]. at_zero may exceed at_one for a falling ramp.
struct Ramp {
  double at_zero;
  double at_one;
  double operator()(double x) const;
};

/// 0 below a, rising to 1 on [b, c], falling back to 0 at d.
struct Trapezoid {
  double a, b, c, d;
  double operator()(double x) const;
};

struct AudioWeights {
  double snr = 0.22;
  double dynamic_range = 0.12;
  double spectral = 0.10;
  double mfcc_variance = 0.10;
  double clipping = 0.12;
  double silence = 0.12;
  double music = 0.12;
  double duration = 0.10;
};

struct AudioQualityConfig {
  AudioWeights weights;
  int working_rate_hz = 16000;
  int frame_ms = 25;
  int hop_ms = 10;
  double silence_dbfs = -45.0;

  double snr_full_marks_db = 30.0;
  double snr_max_db = 100.0;
  double dynamic_range_full_marks_db = 20.0;
  Trapezoid centroid_hz{100.0, 500.0, 2500.0, 5000.0};
  Trapezoid rolloff_hz{200.0, 1000.0, 5000.0, 7500.0};
  double rolloff_fraction = 0.85;
  int mfcc_count = 13;
  int mel_filters = 26;
  /// Mel energies below this fraction of the frame energy are clamped.
  double mel_floor_ratio = 1e-6;
  Ramp mfcc_variance{0.05, 0.5};

  double clip_level = 0.999;
  double clipping_tolerance = 1e-4;
  double clipping_zero_ratio = 0.01;
  double silence_ideal_max_ratio = 0.2;
  double silence_zero_ratio = 1.0;
  double ideal_duration_min_s = 2.0;
  double ideal_duration_max_s = 15.0;
  double duration_zero_s = 30.0;

  void validate() const;
};

/// Raw measurements behind the sub-scores.
struct AudioFeatures {
  double duration_s = 0.0;
  double snr_db = 0.0;
  double dynamic_range_db = 0.0;
  double centroid_hz = 0.0;
  double rolloff_hz = 0.0;
  double mfcc_variance = 0.0;
  double clipping_ratio = 0.0;
  double silence_ratio = 0.0;
  std::size_t frames = 0;
  std::size_t voiced_frames = 0;
};

/// Computes every feature without preconditions; buffers shorter than one
/// frame are zero-padded to a single frame.
AudioFeatures analyze_audio(const AudioBuffer& buffer, const AudioQualityConfig& config = {});

/// Loudest 50% of frames over quietest 10%. Throws std::invalid_argument on
/// buffers shorter than 0.5 s.
double estimate_snr_db(const AudioBuffer& buffer, const AudioQualityConfig& config = {});
double clipping_ratio(const AudioBuffer& buffer, const AudioQualityConfig& config = {});
double silence_ratio(const AudioBuffer& buffer, const AudioQualityConfig& config = {});

struct SpectralScores {
  double spectral = 0.0;
  double mfcc_variance = 0.0;
};
/// Throws std::invalid_argument on buffers shorter than 1 s.
SpectralScores spectral_and_mfcc_scores(const AudioBuffer& buffer,
                                        const AudioQualityConfig& config = {});

/// Fraction of [0, duration] covered by the union of the spans.
double music_ratio(const std::vector<providers::MusicSpan>& spans, double duration_s);

struct AudioScore {
  AudioSubscores subscores;
  double total = 0.0;
  AudioCategory category = AudioCategory::low;
  AudioFeatures features;
  std::vector<std::string> flags;
};

/// `music` empty means the detector failed: the music sub-score is then 1
/// and the result carries the flag "music_unavailable".
AudioScore score_audio_with_music(const AudioBuffer& buffer,
                                  const std::optional<std::vector<providers::MusicSpan>>& music,
                                  const AudioQualityConfig& config = {});

AudioScore score_audio(const AudioBuffer& buffer, providers::MusicProvider& music,
                       const AudioQualityConfig& config = {});

double weighted_total(const AudioSubscores& s, const AudioWeights& w);

}  // namespace ttscorpus::quality
