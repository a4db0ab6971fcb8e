#include "oracles.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "synth.hpp"
#include "ttscorpus/audio/dsp.hpp"
#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::fixtures {

TrimFixture random_trim_fixture(std::mt19937_64& rng, double max_silence_s) {
  constexpr int kRate = 16000;
  std::uniform_int_distribution<int> lead(0, static_cast<int>(max_silence_s * 1000));
  std::uniform_int_distribution<int> word_len(200, 600);
  std::uniform_int_distribution<int> gap(50, 250);
  std::uniform_int_distribution<int> words(3, 15);
  const auto& lex = lexicon();

  const std::int64_t pre_roll = 500;  // recording audio before the span
  const std::int64_t span_start = pre_roll;
  const std::int64_t speech_start = span_start + lead(rng);
  providers::RecordingScript script;
  std::int64_t t = speech_start;
  const int n = words(rng);
  for (int i = 0; i < n; ++i) {
    const std::int64_t len = word_len(rng);
    std::string w = lex[rng() % lex.size()];
    if (i + 1 == n) w += ".";
    script.words.push_back({TimeSpan::from_ms(t, t + len), w});
    t += len;
    if (i + 1 < n) t += gap(rng);
  }
  const std::int64_t speech_end = t;
  const std::int64_t span_end = speech_end + lead(rng);
  const std::int64_t total = span_end + pre_roll;

  std::vector<float> audio = room_tone(total / 1000.0, kRate, rng);
  for (const auto& w : script.words) {
    const auto speech = pseudo_speech(w.span.duration_s(), kRate, rng);
    mix_into(audio, audio::sample_index(w.span.start_ms(), kRate), speech, 1.0f, 1.0f);
  }

  auto lib = std::make_shared<providers::ScriptLibrary>();
  lib->add("fx", script);
  std::string transcript;
  for (const auto& w : script.words) transcript += (transcript.empty() ? "" : " ") + w.text;
  Segment seg{.source_id = "fx", .span = TimeSpan::from_ms(span_start, span_end),
              .transcript = transcript, .completeness = Completeness::complete};
  return {AudioBuffer(std::move(audio), kRate), lib, seg, speech_start, speech_end};
}

double word_distance_oracle(const std::string& a, const std::string& b) {
  const auto x = text::comparison_words(a), y = text::comparison_words(b);
  if (x.empty() && y.empty()) return 0.0;
  // Full dynamic-programming table, rows over x.
  std::vector<std::vector<std::size_t>> d(x.size() + 1, std::vector<std::size_t>(y.size() + 1));
  for (std::size_t i = 0; i <= x.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= y.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (x[i - 1] != y[j - 1])});
    }
  }
  return static_cast<double>(d[x.size()][y.size()]) / static_cast<double>(std::max(x.size(), y.size()));
}

std::int64_t trim_cap_ms(const TimeSpan& span) {
  return std::min<std::int64_t>(3000, (span.duration_ms() - 1) / 100 * 100);
}

ScanResult exhaustive_trim(const AudioBuffer& source, const std::string& id, const TimeSpan& span,
                           const std::string& reference, bool start_side, providers::AsrProvider& asr) {
  ScanResult best;
  for (std::int64_t t = 100; t <= trim_cap_ms(span); t += 100) {
    const TimeSpan probe = start_side ? TimeSpan::from_ms(span.start_ms() + t, span.end_ms())
                                      : TimeSpan::from_ms(span.start_ms(), span.end_ms() - t);
    const auto text = asr.transcribe(audio::slice(source, probe), {id, probe}).text;
    ++best.asr_calls;
    if (word_distance_oracle(text, reference) <= 0.05) best.trim_ms = t;
  }
  return best;
}

int linear_scan_calls(std::int64_t optimal_trim_ms, std::int64_t cap_ms) {
  const std::int64_t stable_steps = optimal_trim_ms / 100;
  const std::int64_t cap_steps = cap_ms / 100;
  return static_cast<int>(stable_steps < cap_steps ? stable_steps + 1 : cap_steps);
}

int expected_extensions(std::int64_t candidate_end_ms, std::int64_t sentence_end_ms) {
  for (int k = 0; k <= 50; ++k) {
    if (candidate_end_ms + 100LL * k >= sentence_end_ms) return k;
  }
  return -1;
}

}  // namespace ttscorpus::fixtures
