#include "ttscorpus/vad/vad.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ttscorpus/audio/dsp.hpp"
#include "ttscorpus/audio/spectrum.hpp"

namespace ttscorpus::vad {
namespace {

constexpr std::array<ThresholdSet, 4> kThresholds{{
    {-55.0, 0.00},
    {-50.0, 0.25},
    {-45.0, 0.35},
    {-40.0, 0.45},
}};

constexpr double kBandLowHz = 80.0;
constexpr double kBandHighHz = 4000.0;

struct Run {
  std::int64_t begin;  // frame index, inclusive
  std::int64_t end;    // frame index, exclusive
};

void split_group(std::span<const Run> runs, std::int64_t max_frames, std::vector<Run>& out) {
  const std::int64_t length = runs.back().end - runs.front().begin;
  if (length <= max_frames) {
    out.push_back({runs.front().begin, runs.back().end});
    return;
  }
  if (runs.size() == 1) {
    // Uninterrupted speech: cut into equal pieces no longer than the limit.
    const std::int64_t pieces = (length + max_frames - 1) / max_frames;
    for (std::int64_t p = 0; p < pieces; ++p) {
      out.push_back({runs[0].begin + length * p / pieces, runs[0].begin + length * (p + 1) / pieces});
    }
    return;
  }
  std::size_t cut = 0;
  std::int64_t longest = -1;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const std::int64_t gap = runs[i + 1].begin - runs[i].end;
    if (gap > longest) {
      longest = gap;
      cut = i;
    }
  }
  split_group(runs.first(cut + 1), max_frames, out);
  split_group(runs.subspan(cut + 1), max_frames, out);
}

}  // namespace

void VadConfig::validate() const {
  if (aggressiveness < 0 || aggressiveness > 3) {
    throw std::invalid_argument("vad aggressiveness must be in 0..3");
  }
  if (frame_ms != 10 && frame_ms != 20 && frame_ms != 30) {
    throw std::invalid_argument("vad frame_ms must be 10, 20 or 30");
  }
  if (min_silence_ms <= 0) throw std::invalid_argument("vad min_silence_ms must be positive");
  if (padding_ms < 0) throw std::invalid_argument("vad padding_ms must be >= 0");
  if (!(min_segment_s >= 0.0) || !(min_segment_s < max_segment_s)) {
    throw std::invalid_argument("vad requires 0 <= min_segment_s < max_segment_s");
  }
}

ThresholdSet thresholds_for(int aggressiveness) {
  if (aggressiveness < 0 || aggressiveness > 3) {
    throw std::invalid_argument("vad aggressiveness must be in 0..3");
  }
  return kThresholds[static_cast<std::size_t>(aggressiveness)];
}

std::vector<FrameLabel> classify_frames(const AudioBuffer& buffer, const VadConfig& config) {
  config.validate();
  const int rate = buffer.sample_rate_hz();
  if (rate != 8000 && rate != 16000 && rate != 32000 && rate != 48000) {
    throw UnsupportedRateError("VAD supports 8/16/32/48 kHz, got " + std::to_string(rate));
  }
  const ThresholdSet gate = thresholds_for(config.aggressiveness);
  const audio::FrameIterator frames(buffer, config.frame_ms);
  audio::RealFft fft(audio::next_power_of_two(frames.frame_length()));
  const std::vector<double> window = audio::hann_window(frames.frame_length());
  const double bin_hz = static_cast<double>(rate) / static_cast<double>(fft.size());
  const auto band_lo = static_cast<std::size_t>(std::ceil(kBandLowHz / bin_hz));
  const auto band_hi = std::min(fft.bins() - 1, static_cast<std::size_t>(std::floor(kBandHighHz / bin_hz)));

  std::vector<FrameLabel> labels;
  labels.reserve(frames.frame_count());
  std::vector<double> power;
  for (const auto frame : frames) {
    if (audio::rms_dbfs(frame) < gate.min_level_dbfs) {
      labels.push_back(FrameLabel::non_speech);
      continue;
    }
    fft.power_spectrum(frame, window, power);
    double total = 0.0;
    double band = 0.0;
    for (std::size_t k = 1; k < power.size(); ++k) {
      total += power[k];
      if (k >= band_lo && k <= band_hi) band += power[k];
    }
    const double ratio = total > 0.0 ? band / total : 0.0;
    labels.push_back(ratio >= gate.min_band_ratio ? FrameLabel::speech : FrameLabel::non_speech);
  }
  return labels;
}

std::vector<TimeSpan> spans_from_labels(std::span<const FrameLabel> labels,
                                        std::int64_t duration_ms, const VadConfig& config) {
  config.validate();
  const std::int64_t frame_ms = config.frame_ms;

  std::vector<Run> runs;
  for (std::size_t i = 0; i < labels.size();) {
    if (labels[i] != FrameLabel::speech) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < labels.size() && labels[j] == FrameLabel::speech) ++j;
    runs.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)});
    i = j;
  }

  const auto max_frames = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(config.max_segment_s * 1000.0 / static_cast<double>(frame_ms))));
  std::vector<Run> pieces;
  std::size_t group_begin = 0;
  for (std::size_t i = 1; i <= runs.size(); ++i) {
    const bool closes = i == runs.size() ||
                        (runs[i].begin - runs[i - 1].end) * frame_ms >= config.min_silence_ms;
    if (closes && i > group_begin) {
      split_group(std::span<const Run>(runs).subspan(group_begin, i - group_begin), max_frames, pieces);
      group_begin = i;
    }
  }

  std::vector<TimeSpan> spans;
  spans.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::int64_t core_start = std::min(pieces[i].begin * frame_ms, duration_ms);
    const std::int64_t core_end = std::min(pieces[i].end * frame_ms, duration_ms);
    std::int64_t start = std::max<std::int64_t>(0, core_start - config.padding_ms);
    std::int64_t end = std::min(duration_ms, core_end + config.padding_ms);
    if (i > 0) {
      const std::int64_t prev_end = std::min(pieces[i - 1].end * frame_ms, duration_ms);
      start = std::max(start, (prev_end + core_start) / 2);
    }
    if (i + 1 < pieces.size()) {
      const std::int64_t next_start = std::min(pieces[i + 1].begin * frame_ms, duration_ms);
      end = std::min(end, (core_end + next_start) / 2);
    }
    if (end > start) spans.push_back(TimeSpan::from_ms(start, end));
  }
  return spans;
}

std::vector<TimeSpan> detect_candidates(const AudioBuffer& buffer, const VadConfig& config) {
  const auto labels = classify_frames(buffer, config);
  auto spans = spans_from_labels(labels, buffer.duration_ms(), config);
  const auto min_ms = static_cast<std::int64_t>(std::llround(config.min_segment_s * 1000.0));
  std::erase_if(spans, [&](const TimeSpan& s) { return s.duration_ms() < min_ms; });
  return spans;
}

}  // namespace ttscorpus::vad
