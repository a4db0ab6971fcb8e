#include "ttscorpus/corpus/types.hpp"

#include <cmath>
#include <stdexcept>

namespace ttscorpus {

AudioBuffer::AudioBuffer(std::vector<float> samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0) {
    throw std::invalid_argument("sample rate must be positive");
  }
  for (float s : samples_) {
    if (!std::isfinite(s) || s < -1.0f || s > 1.0f) {
      throw std::invalid_argument("sample outside [-1, 1]");
    }
  }
}

TimeSpan TimeSpan::from_ms(std::int64_t start_ms, std::int64_t end_ms) {
  if (start_ms < 0) throw std::invalid_argument("span start must be >= 0");
  if (end_ms <= start_ms) throw std::invalid_argument("span end must exceed start");
  return TimeSpan(start_ms, end_ms);
}

TimeSpan TimeSpan::from_seconds(double start_s, double end_s) {
  if (!std::isfinite(start_s) || !std::isfinite(end_s)) {
    throw std::invalid_argument("span bounds must be finite");
  }
  return from_ms(std::llround(start_s * 1000.0), std::llround(end_s * 1000.0));
}

TextCategory text_category(double total) {
  if (total >= 0.7) return TextCategory::high;
  if (total >= 0.5) return TextCategory::mid;
  return TextCategory::low;
}

AudioCategory audio_category(double total) {
  if (total > 0.9) return AudioCategory::high;
  if (total >= 0.75) return AudioCategory::acceptable;
  return AudioCategory::low;
}

std::string_view to_string(Completeness c) {
  switch (c) {
    case Completeness::unknown: return "unknown";
    case Completeness::complete: return "complete";
    case Completeness::incomplete: return "incomplete";
    case Completeness::rejected: return "rejected";
  }
  return "unknown";
}

std::string_view to_string(TextCategory c) {
  switch (c) {
    case TextCategory::high: return "high";
    case TextCategory::mid: return "mid";
    case TextCategory::low: return "low";
  }
  return "low";
}

std::string_view to_string(AudioCategory c) {
  switch (c) {
    case AudioCategory::high: return "high";
    case AudioCategory::acceptable: return "acceptable";
    case AudioCategory::low: return "low";
  }
  return "low";
}

std::string_view to_string(ManifestKind k) {
  return k == ManifestKind::full ? "full" : "tts";
}

Completeness completeness_from_string(std::string_view s) {
  if (s == "unknown") return Completeness::unknown;
  if (s == "complete") return Completeness::complete;
  if (s == "incomplete") return Completeness::incomplete;
  if (s == "rejected") return Completeness::rejected;
  throw std::invalid_argument("unknown completeness: " + std::string(s));
}

TextCategory text_category_from_string(std::string_view s) {
  if (s == "high") return TextCategory::high;
  if (s == "mid") return TextCategory::mid;
  if (s == "low") return TextCategory::low;
  throw std::invalid_argument("unknown text category: " + std::string(s));
}

AudioCategory audio_category_from_string(std::string_view s) {
  if (s == "high") return AudioCategory::high;
  if (s == "acceptable") return AudioCategory::acceptable;
  if (s == "low") return AudioCategory::low;
  throw std::invalid_argument("unknown audio category: " + std::string(s));
}

bool passes_tts_filter(const Segment& segment, const TtsFilter& filter) {
  return segment.completeness == Completeness::complete && segment.quality &&
         segment.quality->audio_total >= filter.audio_min &&
         segment.quality->text_total >= filter.text_min;
}

namespace {

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::optional<std::string> check_invariants(const Segment& segment) {
  if (segment.trim.start_ms < 0 || segment.trim.start_ms > kMaxTrimMs ||
      segment.trim.end_ms < 0 || segment.trim.end_ms > kMaxTrimMs) {
    return "trim amounts must lie in [0, 3] s";
  }
  if (const auto& q = segment.quality) {
    const auto& t = q->text;
    const auto& a = q->audio;
    for (double v : {t.character, t.length, t.repetition, t.phonetic_coverage,
                     q->text_total, a.snr, a.dynamic_range, a.spectral,
                     a.mfcc_variance, a.clipping, a.silence, a.music, a.duration,
                     q->audio_total}) {
      if (!unit(v)) return "quality score outside [0, 1]";
    }
    if (q->text_category != text_category(q->text_total)) {
      return "text category inconsistent with total";
    }
    if (q->audio_category != audio_category(q->audio_total)) {
      return "audio category inconsistent with total";
    }
  }
  if (const auto& s = segment.speaker) {
    if (!unit(s->confidence)) return "speaker confidence outside [0, 1]";
  }
  return std::nullopt;
}

std::optional<std::string> check_invariants(const CorpusManifest& manifest,
                                            const TtsFilter& filter) {
  for (const Segment& s : manifest.segments) {
    if (auto err = check_invariants(s)) {
      return "segment " + s.source_id + "@" + std::to_string(s.span.start_ms()) +
             ": " + *err;
    }
    if (s.completeness != Completeness::complete) {
      return "segment " + s.source_id + "@" + std::to_string(s.span.start_ms()) +
             ": manifest segments must be complete";
    }
    if (manifest.kind == ManifestKind::tts && !passes_tts_filter(s, filter)) {
      return "segment " + s.source_id + "@" + std::to_string(s.span.start_ms()) +
             ": fails the TTS filter";
    }
  }
  const auto& st = manifest.stats;
  if (st.pct_trimmed_start < 0 || st.pct_trimmed_start > 100 ||
      st.pct_trimmed_end < 0 || st.pct_trimmed_end > 100) {
    return "trim percentages outside [0, 100]";
  }
  return std::nullopt;
}

}  // namespace ttscorpus
