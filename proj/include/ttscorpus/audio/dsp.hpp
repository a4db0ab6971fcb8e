#pragma once

#include <cstddef>
#include <iterator>
#include <span>
#include <stdexcept>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus::audio {

/// Band-limited (Kaiser-windowed sinc) sample-rate conversion. Output length
/// is round(len * target / source); same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& buffer, int target_hz);

/// Sample index for a time, floored: floor(ms * rate / 1000).
std::size_t sample_index(std::int64_t ms, int sample_rate_hz);

/// Samples [floor(start), floor(end)). Throws std::out_of_range if the span
/// ends past the buffer, std::invalid_argument if it covers no sample.
AudioBuffer slice(const AudioBuffer& buffer, const TimeSpan& span);

/// Non-overlapping fixed-length frames over a buffer; frame_ms is 10, 20 or
/// 30 and a trailing partial frame is dropped.
class FrameIterator {
 public:
  FrameIterator(const AudioBuffer& buffer, int frame_ms);

  std::size_t frame_length() const { return frame_length_; }
  std::size_t frame_count() const { return samples_.size() / frame_length_; }
  int frame_ms() const { return frame_ms_; }
  std::span<const float> frame(std::size_t i) const {
    return samples_.subspan(i * frame_length_, frame_length_);
  }

  class iterator {
   public:
    using value_type = std::span<const float>;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const FrameIterator* owner, std::size_t index) : owner_(owner), index_(index) {}
    value_type operator*() const { return owner_->frame(index_); }
    iterator& operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      iterator copy = *this;
      ++index_;
      return copy;
    }
    bool operator==(const iterator& o) const { return index_ == o.index_; }

   private:
    const FrameIterator* owner_ = nullptr;
    std::size_t index_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, frame_count()}; }

 private:
  std::span<const float> samples_;
  std::size_t frame_length_;
  int frame_ms_;
};

double rms(std::span<const float> x);
/// RMS in dBFS with a floor of -120 dB for digital silence.
double rms_dbfs(std::span<const float> x);

}  // namespace ttscorpus::audio
