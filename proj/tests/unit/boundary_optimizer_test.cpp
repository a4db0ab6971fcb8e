#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ttscorpus/trim/boundary_optimizer.hpp"

namespace ttscorpus::trim {
namespace {

using providers::ScriptedAsr;
using providers::ScriptLibrary;

constexpr int kRate = 16000;

AudioBuffer quiet(double seconds) {
  return AudioBuffer(std::vector<float>(static_cast<std::size_t>(seconds * kRate)), kRate);
}

std::shared_ptr<ScriptLibrary> words_in(std::int64_t from, std::int64_t to, int n) {
  providers::RecordingScript s;
  const std::int64_t len = (to - from) / n;
  for (int i = 0; i < n; ++i) {
    s.words.push_back({TimeSpan::from_ms(from + i * len, from + (i + 1) * len), "w" + std::to_string(i)});
  }
  auto lib = std::make_shared<ScriptLibrary>();
  lib->add("r", s);
  return lib;
}

Segment complete(const TimeSpan& span, std::string transcript) {
  return {.source_id = "r", .span = span, .transcript = std::move(transcript),
          .completeness = Completeness::complete};
}

TEST(Distance, HandComputed) {
  EXPECT_DOUBLE_EQ(normalized_word_distance("a b c d", "a b c"), 0.25);
  EXPECT_FALSE(transcription_stable("a b c d", "a b c", 0.05));
  EXPECT_TRUE(transcription_stable("Hello, World!", "hello world", 0.0));
  EXPECT_TRUE(transcription_stable("", "", 0.0));
  EXPECT_DOUBLE_EQ(normalized_word_distance("", "a b"), 1.0);
  EXPECT_DOUBLE_EQ(normalized_word_distance("x y z", "a b c"), 1.0);
}

TEST(Distance, MatchesOracleAndIsSymmetric) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> vocab = {"a", "b", "c", "سلام", "B."};
  for (int i = 0; i < 2000; ++i) {
    std::string x, y;
    for (int k = rng() % 7; k > 0; --k) x += vocab[rng() % vocab.size()] + " ";
    for (int k = rng() % 7; k > 0; --k) y += vocab[rng() % vocab.size()] + " ";
    EXPECT_DOUBLE_EQ(normalized_word_distance(x, y), fixtures::word_distance_oracle(x, y));
    EXPECT_DOUBLE_EQ(normalized_word_distance(x, y), normalized_word_distance(y, x));
  }
}

TEST(Config, Validation) {
  EXPECT_THROW(TrimSearchConfig{.initial_trim_s = 0}.validate(), std::invalid_argument);
  EXPECT_THROW(TrimSearchConfig{.stability_threshold = 1.0}.validate(), std::invalid_argument);
  EXPECT_EQ(TrimSearchConfig{}.initial_steps(), 30);
}

TEST(Boundary, FullSpanSpeechTrimsNothing) {
  ScriptedAsr asr(words_in(0, 10000, 10));
  const auto span = TimeSpan::from_ms(0, 10000);
  const std::string ref = "w0 w1 w2 w3 w4 w5 w6 w7 w8 w9";
  EXPECT_EQ(optimize_boundary(quiet(10), "r", span, ref, Side::start, asr).trim_ms, 0);
  EXPECT_EQ(optimize_boundary(quiet(10), "r", span, ref, Side::end, asr).trim_ms, 0);
}

TEST(Boundary, SpeechInsideSpan) {
  ScriptedAsr asr(words_in(2000, 7500, 5));
  const auto span = TimeSpan::from_ms(0, 10000);
  const std::string ref = "w0 w1 w2 w3 w4";
  EXPECT_NEAR(optimize_boundary(quiet(10), "r", span, ref, Side::start, asr).trim_ms, 2000, 100);
  EXPECT_NEAR(optimize_boundary(quiet(10), "r", span, ref, Side::end, asr).trim_ms, 2500, 100);
}

TEST(Boundary, ThreeSecondsLeadIsOneProbe) {
  ScriptedAsr asr(words_in(3000, 6000, 3));
  const auto r = optimize_boundary(quiet(8), "r", TimeSpan::from_ms(0, 8000), "w0 w1 w2", Side::start, asr);
  EXPECT_EQ(r.trim_ms, 3000);
  EXPECT_LE(r.asr_calls, 2);
}

TEST(Boundary, CallBound) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    auto fx = fixtures::random_trim_fixture(rng);
    ScriptedAsr asr(fx.scripts);
    for (Side side : {Side::start, Side::end}) {
      const auto r = optimize_boundary(fx.audio, "fx", fx.segment.span, fx.segment.transcript, side, asr);
      EXPECT_LE(r.asr_calls, 1 + 8 + 30);
    }
  }
}

TEST(Boundary, ShortSpanKeepsOneStep) {
  ScriptedAsr asr(words_in(0, 100, 1));
  const auto r = optimize_boundary(quiet(1), "r", TimeSpan::from_ms(0, 250), "", Side::start, asr);
  EXPECT_LE(r.trim_ms, 200);
  EXPECT_EQ(optimize_boundary(quiet(1), "r", TimeSpan::from_ms(0, 100), "", Side::start, asr).trim_ms, 0);
}

class FailingAsr : public providers::AsrProvider {
 public:
  providers::Transcription transcribe(const AudioBuffer&, const providers::ClipInfo&) override {
    throw providers::ProviderError("down", true);
  }
};

TEST(Boundary, AsrFailureGivesZeroAndFlag) {
  FailingAsr asr;
  const auto r = optimize_boundary(quiet(10), "r", TimeSpan::from_ms(0, 10000), "x", Side::start, asr);
  EXPECT_EQ(r.trim_ms, 0);
  EXPECT_TRUE(r.asr_failed);
  const auto s = optimize_segment(quiet(10), complete(TimeSpan::from_ms(0, 10000), "x"), asr);
  EXPECT_EQ(s.optimized_span, TimeSpan::from_ms(0, 10000));
  EXPECT_EQ(s.flags, (std::vector<std::string>{"trim_start_asr_failed", "trim_end_asr_failed",
                                               "trim_final_asr_failed"}));
}

TEST(Segment, RequiresComplete) {
  ScriptedAsr asr(words_in(0, 1000, 1));
  Segment s = complete(TimeSpan::from_ms(0, 1000), "w0");
  s.completeness = Completeness::incomplete;
  EXPECT_THROW(optimize_segment(quiet(1), s, asr), std::invalid_argument);
}

TEST(Segment, TightSegmentUnchanged) {
  ScriptedAsr asr(words_in(1000, 4000, 3));
  const auto seg = complete(TimeSpan::from_ms(1000, 4000), "w0 w1 w2");
  const auto r = optimize_segment(quiet(5), seg, asr);
  EXPECT_EQ(r.start_trim_ms, 0);
  EXPECT_EQ(r.end_trim_ms, 0);
  EXPECT_EQ(r.optimized_span, seg.span);
  EXPECT_EQ(r.final_transcript, "w0 w1 w2");
}

TEST(Segment, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    auto fx = fixtures::random_trim_fixture(rng);
    ScriptedAsr asr(fx.scripts);
    const auto r = optimize_segment(fx.audio, fx.segment, asr);
    const auto start = fixtures::exhaustive_trim(fx.audio, "fx", fx.segment.span, fx.segment.transcript, true, asr);
    const auto after_start = TimeSpan::from_ms(fx.segment.span.start_ms() + start.trim_ms, fx.segment.span.end_ms());
    const auto end = fixtures::exhaustive_trim(fx.audio, "fx", after_start, fx.segment.transcript, false, asr);
    EXPECT_NEAR(r.start_trim_ms, start.trim_ms, 100) << i;
    EXPECT_NEAR(r.end_trim_ms, end.trim_ms, 100) << i;
    EXPECT_TRUE(fx.segment.span.contains(r.optimized_span));
    EXPECT_TRUE(transcription_stable(r.final_transcript, fx.segment.transcript, 0.05));
    EXPECT_TRUE(r.flags.empty());
  }
}

TEST(Segment, ApplyCopiesTrimLog) {
  ScriptedAsr asr(words_in(2000, 7500, 5));
  Segment seg = complete(TimeSpan::from_ms(0, 10000), "w0 w1 w2 w3 w4");
  apply_trim(seg, optimize_segment(quiet(10), seg, asr));
  EXPECT_EQ(seg.trim.start_ms, 2000);
  EXPECT_EQ(seg.trim.end_ms, 2500);
  EXPECT_EQ(seg.span, TimeSpan::from_ms(2000, 7500));
}

}  // namespace
}  // namespace ttscorpus::trim
