#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ttscorpus::audio {

/// Real-input FFT of a fixed size backed by FFTW. One instance per thread;
/// construction is serialized internally because FFTW planning is not
/// thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  /// |X[k]|^2 for k = 0..size/2 of the zero-padded, multiplied-by-window
  /// frame. `window` must be empty or match `frame` in length.
  void power_spectrum(std::span<const float> frame, std::span<const double> window,
                      std::vector<double>& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_;
};

std::vector<double> hann_window(std::size_t length);

std::size_t next_power_of_two(std::size_t n);

}  // namespace ttscorpus::audio
