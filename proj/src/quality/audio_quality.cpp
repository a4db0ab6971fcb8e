#include "ttscorpus/quality/audio_quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ttscorpus/audio/dsp.hpp"
#include "ttscorpus/audio/spectrum.hpp"

namespace ttscorpus::quality {

double Ramp::operator()(double x) const {
  if (at_zero == at_one) return x >= at_one ? 1.0 : 0.0;
  return std::clamp((x - at_zero) / (at_one - at_zero), 0.0, 1.0);
}

double Trapezoid::operator()(double x) const {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return (x - a) / (b - a);
  if (x > c) return (d - x) / (d - c);
  return 1.0;
}

void AudioQualityConfig::validate() const {
  const auto& w = weights;
  const double parts[] = {w.snr,      w.dynamic_range, w.spectral, w.mfcc_variance,
                          w.clipping, w.silence,       w.music,    w.duration};
  double sum = 0.0;
  for (double p : parts) {
    if (p < 0.0) throw std::invalid_argument("audio weights must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("audio weights must sum to 1");
  if (working_rate_hz < 8000) throw std::invalid_argument("working_rate_hz must be >= 8000");
  if (frame_ms <= 0 || hop_ms <= 0) throw std::invalid_argument("frame and hop must be > 0");
  if (mfcc_count < 2 || mel_filters < mfcc_count) {
    throw std::invalid_argument("need 2 <= mfcc_count <= mel_filters");
  }
  for (const auto& t : {centroid_hz, rolloff_hz}) {
    if (!(t.a < t.b && t.b <= t.c && t.c < t.d)) throw std::invalid_argument("bad trapezoid");
  }
  if (!(clipping_tolerance < clipping_zero_ratio)) {
    throw std::invalid_argument("clipping_tolerance must be below clipping_zero_ratio");
  }
  if (!(silence_ideal_max_ratio < silence_zero_ratio)) {
    throw std::invalid_argument("silence_ideal_max_ratio must be below silence_zero_ratio");
  }
  if (!(0.0 < ideal_duration_min_s && ideal_duration_min_s <= ideal_duration_max_s &&
        ideal_duration_max_s < duration_zero_s)) {
    throw std::invalid_argument("bad duration range");
  }
}

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

/// Triangular filters over FFT bins, [filter][bin].
std::vector<std::vector<double>> mel_filterbank(int filters, std::size_t fft_size, int rate) {
  const std::size_t bins = fft_size / 2 + 1;
  const double top = hz_to_mel(rate / 2.0);
  std::vector<double> edges(filters + 2);
  for (int i = 0; i < filters + 2; ++i) edges[i] = mel_to_hz(top * i / (filters + 1));
  std::vector<std::vector<double>> bank(filters, std::vector<double>(bins, 0.0));
  for (int m = 0; m < filters; ++m) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * rate / fft_size;
      if (f > edges[m] && f < edges[m + 1]) {
        bank[m][k] = (f - edges[m]) / (edges[m + 1] - edges[m]);
      } else if (f >= edges[m + 1] && f < edges[m + 2]) {
        bank[m][k] = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
      }
    }
  }
  return bank;
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - i) * (v[i + 1] - v[i]);
}

}  // namespace

AudioFeatures analyze_audio(const AudioBuffer& buffer, const AudioQualityConfig& config) {
  AudioFeatures f;
  f.duration_s = buffer.duration_seconds();
  if (!buffer.empty()) {
    std::size_t clipped = 0;
    for (float s : buffer.samples()) clipped += std::abs(s) >= config.clip_level;
    f.clipping_ratio = static_cast<double>(clipped) / buffer.size();
  }

  const AudioBuffer work = audio::resample(buffer, config.working_rate_hz);
  const int rate = config.working_rate_hz;
  const auto frame_len = static_cast<std::size_t>(config.frame_ms * rate / 1000);
  const auto hop = static_cast<std::size_t>(config.hop_ms * rate / 1000);
  std::vector<float> samples(work.samples().begin(), work.samples().end());
  if (samples.size() < frame_len) samples.resize(frame_len, 0.0f);
  const std::size_t n_frames = 1 + (samples.size() - frame_len) / hop;
  f.frames = n_frames;

  std::vector<double> power(n_frames);
  std::vector<double> level_db(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::span<const float> fr(samples.data() + i * hop, frame_len);
    const double r = audio::rms(fr);
    power[i] = r * r;
    level_db[i] = audio::rms_dbfs(fr);
  }

  std::size_t silent = 0;
  for (double db : level_db) silent += db < config.silence_dbfs;
  f.silence_ratio = static_cast<double>(silent) / n_frames;

  std::vector<double> sorted = power;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t quiet_n = std::max<std::size_t>(1, n_frames / 10);
  const std::size_t loud_n = std::max<std::size_t>(1, n_frames / 2);
  double noise = 0.0;
  double signal = 0.0;
  for (std::size_t i = 0; i < quiet_n; ++i) noise += sorted[i];
  for (std::size_t i = 0; i < loud_n; ++i) signal += sorted[n_frames - 1 - i];
  noise = std::max(noise / quiet_n, std::numeric_limits<double>::epsilon());
  signal /= loud_n;
  f.snr_db = signal > 0.0
                 ? std::clamp(10.0 * std::log10(signal / noise), 0.0, config.snr_max_db)
                 : 0.0;

  f.dynamic_range_db = percentile(level_db, 0.95) - percentile(level_db, 0.05);

  const std::size_t fft_size = audio::next_power_of_two(frame_len);
  audio::RealFft fft(fft_size);
  const auto window = audio::hann_window(frame_len);
  const auto bank = mel_filterbank(config.mel_filters, fft_size, rate);
  const int n_mel = config.mel_filters;
  const int n_cep = config.mfcc_count;

  std::vector<double> spectrum;
  std::vector<double> log_mel(n_mel);
  std::vector<std::vector<double>> ceps;  // C1..C{n_cep-1} per voiced frame
  double centroid_sum = 0.0;
  double rolloff_sum = 0.0;
  const double bin_hz = static_cast<double>(rate) / fft_size;
  for (std::size_t i = 0; i < n_frames; ++i) {
    if (level_db[i] < config.silence_dbfs) continue;
    fft.power_spectrum(std::span<const float>(samples.data() + i * hop, frame_len), window,
                       spectrum);
    double total = 0.0;
    double moment = 0.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      total += spectrum[k];
      moment += spectrum[k] * k * bin_hz;
    }
    if (total <= 0.0) continue;
    ++f.voiced_frames;
    centroid_sum += moment / total;
    double acc = 0.0;
    std::size_t k = 0;
    for (; k < spectrum.size(); ++k) {
      acc += spectrum[k];
      if (acc >= config.rolloff_fraction * total) break;
    }
    rolloff_sum += std::min(k, spectrum.size() - 1) * bin_hz;

    // Mel energies are floored relative to the frame so that window leakage
    // far below the signal does not register as spectral movement.
    const double floor = std::max(total * config.mel_floor_ratio, 1e-10);
    for (int m = 0; m < n_mel; ++m) {
      double e = 0.0;
      for (std::size_t b = 0; b < spectrum.size(); ++b) e += bank[m][b] * spectrum[b];
      log_mel[m] = std::log(std::max(e, floor));
    }
    std::vector<double> c(n_cep - 1);
    const double scale = std::sqrt(2.0 / n_mel);
    for (int q = 1; q < n_cep; ++q) {
      double acc_c = 0.0;
      for (int m = 0; m < n_mel; ++m) {
        acc_c += log_mel[m] * std::cos(std::numbers::pi * q * (m + 0.5) / n_mel);
      }
      c[q - 1] = scale * acc_c;
    }
    ceps.push_back(std::move(c));
  }

  if (f.voiced_frames > 0) {
    f.centroid_hz = centroid_sum / f.voiced_frames;
    f.rolloff_hz = rolloff_sum / f.voiced_frames;
  }
  if (ceps.size() >= 2) {
    double var_sum = 0.0;
    const double n = static_cast<double>(ceps.size());
    for (int q = 0; q < n_cep - 1; ++q) {
      double mean = 0.0;
      for (const auto& c : ceps) mean += c[q];
      mean /= n;
      double var = 0.0;
      for (const auto& c : ceps) var += (c[q] - mean) * (c[q] - mean);
      var_sum += var / n;
    }
    f.mfcc_variance = var_sum / (n_cep - 1);
  }
  return f;
}

double estimate_snr_db(const AudioBuffer& buffer, const AudioQualityConfig& config) {
  if (buffer.duration_seconds() < 0.5) throw std::invalid_argument("SNR needs at least 0.5 s");
  return analyze_audio(buffer, config).snr_db;
}

double clipping_ratio(const AudioBuffer& buffer, const AudioQualityConfig& config) {
  if (buffer.empty()) return 0.0;
  std::size_t clipped = 0;
  for (float s : buffer.samples()) clipped += std::abs(s) >= config.clip_level;
  return static_cast<double>(clipped) / buffer.size();
}

double silence_ratio(const AudioBuffer& buffer, const AudioQualityConfig& config) {
  return analyze_audio(buffer, config).silence_ratio;
}

namespace {

SpectralScores spectral_scores(const AudioFeatures& f, const AudioQualityConfig& config) {
  if (f.voiced_frames == 0) return {};
  return {(config.centroid_hz(f.centroid_hz) + config.rolloff_hz(f.rolloff_hz)) / 2.0,
          config.mfcc_variance(f.mfcc_variance)};
}

}  // namespace

SpectralScores spectral_and_mfcc_scores(const AudioBuffer& buffer,
                                        const AudioQualityConfig& config) {
  if (buffer.duration_seconds() < 1.0) {
    throw std::invalid_argument("spectral features need at least 1 s");
  }
  return spectral_scores(analyze_audio(buffer, config), config);
}

double music_ratio(const std::vector<providers::MusicSpan>& spans, double duration_s) {
  if (duration_s <= 0.0) return 0.0;
  const auto limit = static_cast<std::int64_t>(std::llround(duration_s * 1000.0));
  std::vector<std::pair<std::int64_t, std::int64_t>> iv;
  for (const auto& s : spans) {
    if (s.kind != providers::MusicKind::music) continue;
    const std::int64_t a = std::clamp<std::int64_t>(s.span.start_ms(), 0, limit);
    const std::int64_t b = std::clamp<std::int64_t>(s.span.end_ms(), 0, limit);
    if (b > a) iv.emplace_back(a, b);
  }
  std::sort(iv.begin(), iv.end());
  std::int64_t covered = 0;
  std::int64_t cur_a = -1;
  std::int64_t cur_b = -1;
  for (const auto& [a, b] : iv) {
    if (a > cur_b) {
      covered += cur_b - cur_a;
      cur_a = a;
      cur_b = b;
    } else {
      cur_b = std::max(cur_b, b);
    }
  }
  covered += cur_b - cur_a;
  return std::clamp(static_cast<double>(covered) / limit, 0.0, 1.0);
}

double weighted_total(const AudioSubscores& s, const AudioWeights& w) {
  return std::clamp(w.snr * s.snr + w.dynamic_range * s.dynamic_range + w.spectral * s.spectral +
                        w.mfcc_variance * s.mfcc_variance + w.clipping * s.clipping +
                        w.silence * s.silence + w.music * s.music + w.duration * s.duration,
                    0.0, 1.0);
}

AudioScore score_audio_with_music(const AudioBuffer& buffer,
                                  const std::optional<std::vector<providers::MusicSpan>>& music,
                                  const AudioQualityConfig& config) {
  AudioScore out;
  out.features = analyze_audio(buffer, config);
  const AudioFeatures& f = out.features;
  AudioSubscores& s = out.subscores;

  s.snr = Ramp{0.0, config.snr_full_marks_db}(f.snr_db);
  s.dynamic_range = Ramp{0.0, config.dynamic_range_full_marks_db}(f.dynamic_range_db);
  const SpectralScores sp = spectral_scores(f, config);
  s.spectral = sp.spectral;
  s.mfcc_variance = sp.mfcc_variance;
  s.clipping = f.clipping_ratio <= config.clipping_tolerance
                   ? 1.0
                   : Ramp{config.clipping_zero_ratio, config.clipping_tolerance}(f.clipping_ratio);
  s.silence = f.silence_ratio <= config.silence_ideal_max_ratio
                  ? 1.0
                  : Ramp{config.silence_zero_ratio, config.silence_ideal_max_ratio}(f.silence_ratio);
  if (music) {
    s.music = 1.0 - music_ratio(*music, f.duration_s);
  } else {
    s.music = 1.0;
    out.flags.push_back("music_unavailable");
  }
  if (f.duration_s < config.ideal_duration_min_s) {
    s.duration = f.duration_s / config.ideal_duration_min_s;
  } else if (f.duration_s <= config.ideal_duration_max_s) {
    s.duration = 1.0;
  } else {
    s.duration = Ramp{config.duration_zero_s, config.ideal_duration_max_s}(f.duration_s);
  }

  out.total = weighted_total(s, config.weights);
  out.category = audio_category(out.total);
  return out;
}

AudioScore score_audio(const AudioBuffer& buffer, providers::MusicProvider& music,
                       const AudioQualityConfig& config) {
  std::optional<std::vector<providers::MusicSpan>> spans;
  try {
    spans = music.detect_music(buffer);
  } catch (const providers::ProviderError&) {
    spans.reset();
  }
  return score_audio_with_music(buffer, spans, config);
}

}  // namespace ttscorpus::quality
