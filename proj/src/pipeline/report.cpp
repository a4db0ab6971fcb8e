#include "ttscorpus/pipeline/report.hpp"

#include <fmt/format.h>

#include "ttscorpus/corpus/manifest.hpp"

namespace ttscorpus::pipeline {

using nlohmann::json;

json report_to_json(const RunReport& r) {
  json consistency = "n/a";
  if (r.consistency) {
    consistency = {{"percentage", r.consistency->percentage},
                   {"matched", r.consistency->matched},
                   {"labeled_recordings", r.consistency->labeled},
                   {"narrator_to_global", r.consistency->narrator_to_global}};
  }
  return {{"before_filtering", stats_to_json(r.before)},
          {"after_tts_filtering", stats_to_json(r.after)},
          {"consistency", consistency},
          {"recordings", {{"processed", r.recordings - r.failed_recordings},
                          {"failed", r.failed_recordings}}},
          {"segments", {{"candidates", r.candidates},
                        {"rejected", r.rejected_segments},
                        {"rejected_by_cause", r.rejections_by_cause}}}};
}

std::string render_report_text(const RunReport& r) {
  const auto& b = r.before;
  const auto& a = r.after;
  std::string out = fmt::format("{:<28}{:>18}{:>22}\n", "", "Before Filtering", "After TTS Filtering");
  auto row = [&](const char* name, const std::string& x, const std::string& y) {
    out += fmt::format("{:<28}{:>18}{:>22}\n", name, x, y);
  };
  row("Total Hours", fmt::format("{:.4f}", b.total_hours), fmt::format("{:.4f}", a.total_hours));
  row("Segments", std::to_string(b.segment_count), std::to_string(a.segment_count));
  row("Trimmed Hours", fmt::format("{:.4f}", b.trimmed_hours), fmt::format("{:.4f}", a.trimmed_hours));
  row("Trimmed at Start (%)", fmt::format("{:.1f}", b.pct_trimmed_start),
      fmt::format("{:.1f}", a.pct_trimmed_start));
  row("Trimmed at End (%)", fmt::format("{:.1f}", b.pct_trimmed_end),
      fmt::format("{:.1f}", a.pct_trimmed_end));
  row("Mean Duration (s)", fmt::format("{:.2f}", b.mean_segment_duration_s),
      fmt::format("{:.2f}", a.mean_segment_duration_s));
  row("Unique Words", std::to_string(b.unique_words), std::to_string(a.unique_words));
  row("Total Tokens", std::to_string(b.total_tokens), std::to_string(a.total_tokens));
  row("Speakers", std::to_string(b.speaker_count), std::to_string(a.speaker_count));
  out += "\n";
  out += fmt::format("Narrator consistency: {}\n",
                     r.consistency ? fmt::format("{:.1f}% ({}/{} recordings)", r.consistency->percentage,
                                                 r.consistency->matched, r.consistency->labeled)
                                   : std::string("n/a"));
  out += fmt::format("Recordings: {} processed, {} failed\n", r.recordings - r.failed_recordings,
                     r.failed_recordings);
  out += fmt::format("Candidates: {}, rejected: {}\n", r.candidates, r.rejected_segments);
  for (const auto& [cause, n] : r.rejections_by_cause) out += fmt::format("  {}: {}\n", cause, n);
  return out;
}

std::string render_stats_text(const CorpusStats& s) {
  std::string out;
  out += fmt::format("Total Hours          {:.6f}\n", s.total_hours);
  out += fmt::format("Segments             {}\n", s.segment_count);
  out += fmt::format("Trimmed Hours        {:.6f}\n", s.trimmed_hours);
  out += fmt::format("Trimmed at Start (%) {:.2f}\n", s.pct_trimmed_start);
  out += fmt::format("Trimmed at End (%)   {:.2f}\n", s.pct_trimmed_end);
  out += fmt::format("Mean Duration (s)    {:.3f}\n", s.mean_segment_duration_s);
  out += fmt::format("Unique Words         {}\n", s.unique_words);
  out += fmt::format("Total Tokens         {}\n", s.total_tokens);
  out += fmt::format("Speakers             {}\n", s.speaker_count);
  return out;
}

}  // namespace ttscorpus::pipeline
