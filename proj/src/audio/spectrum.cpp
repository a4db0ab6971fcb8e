#include "ttscorpus/audio/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ttscorpus::audio {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Impl {
  double* input = nullptr;
  fftw_complex* output = nullptr;
  fftw_plan plan = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(input);
    fftw_free(output);
  }
};

RealFft::RealFft(std::size_t size) : impl_(std::make_unique<Impl>()), size_(size) {
  if (size < 2) throw std::invalid_argument("FFT size must be at least 2");
  std::lock_guard lock(planner_mutex());
  impl_->input = static_cast<double*>(fftw_malloc(sizeof(double) * size));
  impl_->output = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (size / 2 + 1)));
  if (!impl_->input || !impl_->output) throw std::bad_alloc();
  impl_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(size), impl_->input, impl_->output,
                                     FFTW_ESTIMATE);
  if (!impl_->plan) throw std::runtime_error("FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::power_spectrum(std::span<const float> frame, std::span<const double> window,
                             std::vector<double>& out) {
  if (frame.size() > size_) throw std::invalid_argument("frame longer than FFT size");
  if (!window.empty() && window.size() != frame.size()) {
    throw std::invalid_argument("window length mismatch");
  }
  for (std::size_t i = 0; i < size_; ++i) {
    double v = i < frame.size() ? frame[i] : 0.0;
    if (!window.empty() && i < frame.size()) v *= window[i];
    impl_->input[i] = v;
  }
  fftw_execute(impl_->plan);
  out.resize(bins());
  for (std::size_t k = 0; k < bins(); ++k) {
    const double re = impl_->output[k][0];
    const double im = impl_->output[k][1];
    out[k] = re * re + im * im;
  }
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  if (length == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(length - 1));
  }
  return w;
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ttscorpus::audio
