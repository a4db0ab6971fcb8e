#include "ttscorpus/corpus/stats.hpp"

#include <set>
#include <unordered_set>

#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus {

CorpusStats compute_stats(std::span<const Segment> segments) {
  CorpusStats stats;
  if (segments.empty()) return stats;

  std::int64_t total_ms = 0;
  std::int64_t trimmed_ms = 0;
  std::int64_t trimmed_start = 0;
  std::int64_t trimmed_end = 0;
  std::unordered_set<std::string> vocabulary;
  std::set<int> speakers;

  for (const Segment& s : segments) {
    total_ms += s.span.duration_ms();
    trimmed_ms += s.trim.start_ms + s.trim.end_ms;
    if (s.trim.start_ms > 0) ++trimmed_start;
    if (s.trim.end_ms > 0) ++trimmed_end;
    for (const std::string& token : text::whitespace_tokens(s.transcript)) {
      ++stats.total_tokens;
      std::string word = text::normalize_for_comparison(token);
      if (!word.empty()) vocabulary.insert(std::move(word));
    }
    if (s.speaker && s.speaker->global_id) speakers.insert(*s.speaker->global_id);
  }

  const auto n = static_cast<double>(segments.size());
  stats.segment_count = static_cast<std::int64_t>(segments.size());
  stats.total_hours = static_cast<double>(total_ms) / 1000.0 / 3600.0;
  stats.trimmed_hours = static_cast<double>(trimmed_ms) / 1000.0 / 3600.0;
  stats.pct_trimmed_start = 100.0 * static_cast<double>(trimmed_start) / n;
  stats.pct_trimmed_end = 100.0 * static_cast<double>(trimmed_end) / n;
  stats.mean_segment_duration_s = static_cast<double>(total_ms) / 1000.0 / n;
  stats.unique_words = static_cast<std::int64_t>(vocabulary.size());
  stats.speaker_count = static_cast<std::int64_t>(speakers.size());
  return stats;
}

}  // namespace ttscorpus
