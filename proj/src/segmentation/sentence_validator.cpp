#include "ttscorpus/segmentation/sentence_validator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ttscorpus/audio/dsp.hpp"

namespace ttscorpus::segmentation {

std::string_view to_string(ExtensionDirection d) {
  return d == ExtensionDirection::end ? "end" : "both";
}

ExtensionDirection extension_direction_from_string(std::string_view s) {
  if (s == "end") return ExtensionDirection::end;
  if (s == "both") return ExtensionDirection::both;
  throw std::invalid_argument("unknown extension direction: " + std::string(s));
}

void ExtensionPolicy::validate() const {
  if (!(step_s > 0.0)) throw std::invalid_argument("extension step_s must be > 0");
  if (step_ms() < 1) throw std::invalid_argument("extension step_s must be at least 1 ms");
  if (!(max_total_extension_s >= step_s)) {
    throw std::invalid_argument("max_total_extension_s must be >= step_s");
  }
  if (!(max_segment_s > 0.0)) throw std::invalid_argument("max_segment_s must be > 0");
}

std::int64_t ExtensionPolicy::step_ms() const { return std::llround(step_s * 1000.0); }

int ExtensionPolicy::max_extensions() const {
  const std::int64_t budget = std::llround(max_total_extension_s * 1000.0);
  const std::int64_t step = step_ms();
  return static_cast<int>((budget + step - 1) / step);
}

ValidationResult validate_segment(const AudioBuffer& source, std::string_view source_id,
                                  const TimeSpan& candidate, providers::AsrProvider& asr,
                                  providers::CompletenessProvider& classifier,
                                  const ExtensionPolicy& policy) {
  policy.validate();
  const std::int64_t source_ms = source.duration_ms();
  if (candidate.end_ms() > source_ms) {
    throw std::out_of_range("candidate ends past the source audio");
  }
  const std::int64_t step = policy.step_ms();
  const std::int64_t max_len = std::llround(policy.max_segment_s * 1000.0);
  const int max_ext = policy.max_extensions();

  ValidationResult result{
      .segment = {.source_id = std::string(source_id), .span = candidate},
  };
  Segment& seg = result.segment;
  auto reject = [&](std::string cause) {
    seg.completeness = Completeness::rejected;
    result.cause = std::move(cause);
    return result;
  };

  for (int ext = 0;; ++ext) {
    if (seg.span.duration_ms() > max_len) return reject("max_length");
    try {
      ++result.asr_calls;
      seg.transcript =
          asr.transcribe(audio::slice(source, seg.span), {std::string(source_id), seg.span}).text;
      if (!seg.transcript.empty() && classifier.check_completeness(seg.transcript).is_complete) {
        seg.completeness = Completeness::complete;
        return result;
      }
    } catch (const providers::ProviderError& e) {
      return reject(std::string("provider: ") + e.what());
    }
    if (ext == max_ext) return reject(seg.transcript.empty() ? "empty_transcript" : "budget");

    std::int64_t start = seg.span.start_ms();
    std::int64_t end = std::min(seg.span.end_ms() + step, source_ms);
    if (policy.direction == ExtensionDirection::both) start = std::max<std::int64_t>(0, start - step);
    if (start == seg.span.start_ms() && end == seg.span.end_ms()) return reject("end_of_audio");
    seg.span = TimeSpan::from_ms(start, end);
    result.extensions = ext + 1;
  }
}

}  // namespace ttscorpus::segmentation
