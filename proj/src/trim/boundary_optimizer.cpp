#include "ttscorpus/trim/boundary_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ttscorpus/audio/dsp.hpp"
#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::trim {

void TrimSearchConfig::validate() const {
  if (!(initial_trim_s > 0.0)) throw std::invalid_argument("initial_trim_s must be > 0");
  if (!(fine_step_s > 0.0) || fine_step_ms() < 1) {
    throw std::invalid_argument("fine_step_s must be at least 1 ms");
  }
  if (!(stability_threshold >= 0.0 && stability_threshold < 1.0)) {
    throw std::invalid_argument("stability_threshold must be in [0, 1)");
  }
  if (max_binary_iterations < 0) throw std::invalid_argument("max_binary_iterations must be >= 0");
  if (initial_steps() < 1) throw std::invalid_argument("initial_trim_s must cover one fine step");
}

std::int64_t TrimSearchConfig::fine_step_ms() const { return std::llround(fine_step_s * 1000.0); }

int TrimSearchConfig::initial_steps() const {
  return static_cast<int>(std::llround(initial_trim_s * 1000.0) / fine_step_ms());
}

double normalized_word_distance(std::string_view a, std::string_view b) {
  const auto wa = text::comparison_words(a);
  const auto wb = text::comparison_words(b);
  const std::size_t longest = std::max(wa.size(), wb.size());
  if (longest == 0) return 0.0;

  std::vector<std::size_t> row(wb.size() + 1);
  for (std::size_t j = 0; j <= wb.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= wa.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= wb.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (wa[i - 1] == wb[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return static_cast<double>(row[wb.size()]) / static_cast<double>(longest);
}

bool transcription_stable(std::string_view a, std::string_view b, double threshold) {
  return normalized_word_distance(a, b) <= threshold;
}

std::string_view to_string(Side s) { return s == Side::start ? "start" : "end"; }

namespace {

TimeSpan trimmed(const TimeSpan& span, Side side, std::int64_t ms) {
  return side == Side::start ? TimeSpan::from_ms(span.start_ms() + ms, span.end_ms())
                             : TimeSpan::from_ms(span.start_ms(), span.end_ms() - ms);
}

}  // namespace

BoundaryResult optimize_boundary(const AudioBuffer& source, std::string_view source_id,
                                 const TimeSpan& span, std::string_view reference, Side side,
                                 providers::AsrProvider& asr, const TrimSearchConfig& config) {
  config.validate();
  BoundaryResult result;
  const std::int64_t step = config.fine_step_ms();
  const int max_n = static_cast<int>(
      std::min<std::int64_t>(config.initial_steps(), (span.duration_ms() - 1) / step));
  if (max_n < 1) return result;

  std::map<int, bool> probes;
  auto stable = [&](int n) {
    if (auto it = probes.find(n); it != probes.end()) return it->second;
    const TimeSpan probe = trimmed(span, side, n * step);
    ++result.asr_calls;
    const auto t = asr.transcribe(audio::slice(source, probe), {std::string(source_id), probe});
    const bool ok = transcription_stable(t.text, reference, config.stability_threshold);
    probes.emplace(n, ok);
    return ok;
  };

  try {
    if (stable(max_n)) {
      result.trim_ms = max_n * step;
      return result;
    }
    // lo is stable (0 is the reference itself), hi is unstable.
    int lo = 0;
    int hi = max_n;
    for (int i = 0; i < config.max_binary_iterations && hi - lo > 1; ++i) {
      const int mid = lo + (hi - lo) / 2;
      (stable(mid) ? lo : hi) = mid;
    }
    while (lo + 1 < hi && stable(lo + 1)) ++lo;
    result.trim_ms = lo * step;
  } catch (const providers::ProviderError&) {
    result.trim_ms = 0;
    result.asr_failed = true;
  }
  return result;
}

TrimResult optimize_segment(const AudioBuffer& source, const Segment& segment,
                            providers::AsrProvider& asr, const TrimSearchConfig& config) {
  if (segment.completeness != Completeness::complete) {
    throw std::invalid_argument("optimize_segment requires a complete segment");
  }
  const std::string& reference = segment.transcript;
  TrimResult result{.optimized_span = segment.span};

  for (Side side : {Side::start, Side::end}) {
    const BoundaryResult b = optimize_boundary(source, segment.source_id, result.optimized_span,
                                               reference, side, asr, config);
    result.asr_calls += b.asr_calls;
    if (b.asr_failed) result.flags.push_back("trim_" + std::string(to_string(side)) + "_asr_failed");
    (side == Side::start ? result.start_trim_ms : result.end_trim_ms) = b.trim_ms;
    if (b.trim_ms > 0) result.optimized_span = trimmed(result.optimized_span, side, b.trim_ms);
  }

  try {
    ++result.asr_calls;
    result.final_transcript =
        asr.transcribe(audio::slice(source, result.optimized_span),
                       {segment.source_id, result.optimized_span})
            .text;
    if (!transcription_stable(result.final_transcript, reference, config.stability_threshold)) {
      // Providers that are not deterministic can break the probe result.
      result.flags.push_back("trim_unstable_reverted");
      result.optimized_span = segment.span;
      result.start_trim_ms = result.end_trim_ms = 0;
      result.final_transcript = reference;
    }
  } catch (const providers::ProviderError&) {
    result.flags.push_back("trim_final_asr_failed");
    result.optimized_span = segment.span;
    result.start_trim_ms = result.end_trim_ms = 0;
    result.final_transcript = reference;
  }
  return result;
}

void apply_trim(Segment& segment, const TrimResult& result) {
  segment.span = result.optimized_span;
  segment.transcript = result.final_transcript;
  segment.trim = {result.start_trim_ms, result.end_trim_ms};
  segment.flags.insert(segment.flags.end(), result.flags.begin(), result.flags.end());
}

}  // namespace ttscorpus::trim
