#include "ttscorpus/audio/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace ttscorpus::audio {
namespace {

constexpr double kZeroCrossings = 16.0;
constexpr double kKaiserBeta = 8.0;
constexpr double kCutoffScale = 0.95;
constexpr std::int64_t kMaxTablePhases = 4096;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

class SincKernel {
 public:
  SincKernel(double cutoff)
      : cutoff_(cutoff),
        half_width_(kZeroCrossings / cutoff),
        norm_(1.0 / std::cyl_bessel_i(0.0, kKaiserBeta)) {}

  double half_width() const { return half_width_; }

  double operator()(double t) const {
    const double r = t / half_width_;
    if (r <= -1.0 || r >= 1.0) return 0.0;
    const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) * norm_;
    return cutoff_ * sinc(cutoff_ * t) * window;
  }

 private:
  double cutoff_;
  double half_width_;
  double norm_;
};

}  // namespace

AudioBuffer resample(const AudioBuffer& buffer, int target_hz) {
  if (target_hz <= 0) throw std::invalid_argument("target rate must be positive");
  const int source_hz = buffer.sample_rate_hz();
  if (target_hz == source_hz) return buffer;

  const std::int64_t g = std::gcd(static_cast<std::int64_t>(source_hz),
                                  static_cast<std::int64_t>(target_hz));
  const std::int64_t up = target_hz / g;    // L
  const std::int64_t down = source_hz / g;  // M
  const auto in = buffer.samples();
  const auto in_len = static_cast<std::int64_t>(in.size());
  const auto out_len = static_cast<std::int64_t>(
      std::llround(static_cast<double>(in_len) * target_hz / source_hz));

  const double cutoff = std::min(1.0, static_cast<double>(up) / static_cast<double>(down)) *
                        kCutoffScale;
  const SincKernel kernel(cutoff);
  const auto taps = static_cast<std::int64_t>(std::ceil(kernel.half_width()));
  const std::int64_t width = 2 * taps;

  // Tap m of phase p weights input sample (base + m - taps + 1).
  std::vector<double> table;
  const bool tabulate = up <= kMaxTablePhases;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up * width));
    for (std::int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / static_cast<double>(up);
      for (std::int64_t m = 0; m < width; ++m) {
        table[static_cast<std::size_t>(p * width + m)] = kernel(frac - static_cast<double>(m - taps + 1));
      }
    }
  }

  std::vector<float> out(static_cast<std::size_t>(out_len));
  for (std::int64_t n = 0; n < out_len; ++n) {
    const std::int64_t base = (n * down) / up;
    const std::int64_t phase = (n * down) % up;
    const double frac = static_cast<double>(phase) / static_cast<double>(up);
    double acc = 0.0;
    for (std::int64_t m = 0; m < width; ++m) {
      const std::int64_t j = base + m - taps + 1;
      if (j < 0 || j >= in_len) continue;
      const double w = tabulate ? table[static_cast<std::size_t>(phase * width + m)]
                                : kernel(frac - static_cast<double>(m - taps + 1));
      acc += w * in[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(n)] = static_cast<float>(std::clamp(acc, -1.0, 1.0));
  }
  return AudioBuffer(std::move(out), target_hz);
}

std::size_t sample_index(std::int64_t ms, int sample_rate_hz) {
  return static_cast<std::size_t>(ms * sample_rate_hz / 1000);
}

AudioBuffer slice(const AudioBuffer& buffer, const TimeSpan& span) {
  const std::size_t begin = sample_index(span.start_ms(), buffer.sample_rate_hz());
  const std::size_t end = sample_index(span.end_ms(), buffer.sample_rate_hz());
  if (end > buffer.size()) {
    throw std::out_of_range("span [" + std::to_string(span.start_ms()) + ", " +
                            std::to_string(span.end_ms()) + ") ms exceeds buffer of " +
                            std::to_string(buffer.size()) + " samples");
  }
  if (end <= begin) throw std::invalid_argument("span covers no samples");
  const auto s = buffer.samples();
  return AudioBuffer(std::vector<float>(s.begin() + static_cast<std::ptrdiff_t>(begin),
                                        s.begin() + static_cast<std::ptrdiff_t>(end)),
                     buffer.sample_rate_hz());
}

FrameIterator::FrameIterator(const AudioBuffer& buffer, int frame_ms)
    : samples_(buffer.samples()), frame_ms_(frame_ms) {
  if (frame_ms != 10 && frame_ms != 20 && frame_ms != 30) {
    throw std::invalid_argument("frame length must be 10, 20 or 30 ms");
  }
  const long long product = static_cast<long long>(buffer.sample_rate_hz()) * frame_ms;
  if (product % 1000 != 0) {
    throw std::invalid_argument("sample rate does not divide into whole-sample frames");
  }
  frame_length_ = static_cast<std::size_t>(product / 1000);
}

double rms(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double rms_dbfs(std::span<const float> x) {
  const double r = rms(x);
  return r <= 1e-6 ? -120.0 : 20.0 * std::log10(r);
}

}  // namespace ttscorpus::audio
