#include <gtest/gtest.h>

#include <random>

#include "synth.hpp"
#include "ttscorpus/vad/vad.hpp"

namespace ttscorpus::vad {
namespace {

using fixtures::append;
using fixtures::silence;
using fixtures::tone;

constexpr int kRate = 16000;

AudioBuffer tones_with_gap(double gap_s) {
  std::vector<float> v = silence(1.0, kRate);
  append(v, tone(2.0, kRate, 440, 0.3f));
  append(v, silence(gap_s, kRate));
  append(v, tone(2.0, kRate, 440, 0.3f));
  append(v, silence(1.0, kRate));
  return AudioBuffer(v, kRate);
}

TEST(Classify, SilenceIsNonSpeech) {
  const AudioBuffer b(silence(3.0, kRate), kRate);
  for (auto l : classify_frames(b, {})) ASSERT_EQ(l, FrameLabel::non_speech);
}

TEST(Classify, NoiseBurstIsSpeechAtDefaultAggressiveness) {
  std::mt19937_64 rng(1);
  std::vector<float> v = silence(1.0, kRate);
  append(v, fixtures::white_noise(1.0, kRate, rng, 1.0f));
  append(v, silence(1.0, kRate));
  const auto labels = classify_frames(AudioBuffer(v, kRate), {.aggressiveness = 1});
  ASSERT_EQ(labels.size(), 100u);
  for (int i = 0; i < 33; ++i) EXPECT_EQ(labels[i], FrameLabel::non_speech) << i;
  for (int i = 34; i < 66; ++i) EXPECT_EQ(labels[i], FrameLabel::speech) << i;
  for (int i = 67; i < 100; ++i) EXPECT_EQ(labels[i], FrameLabel::non_speech) << i;
}

TEST(Classify, Deterministic) {
  std::mt19937_64 rng(2);
  const AudioBuffer b(fixtures::pseudo_speech(4.0, kRate, rng), kRate);
  EXPECT_EQ(classify_frames(b, {}), classify_frames(b, {}));
}

TEST(Classify, UnsupportedRate) {
  const AudioBuffer b(silence(1.0, 44100), 44100);
  EXPECT_THROW(classify_frames(b, {}), UnsupportedRateError);
}

TEST(Classify, HigherAggressivenessIsStricter) {
  std::mt19937_64 rng(3);
  std::vector<float> v = fixtures::pseudo_speech(3.0, kRate, rng, 0.01f);
  append(v, fixtures::pseudo_speech(3.0, kRate, rng, 0.3f));
  const AudioBuffer b(v, kRate);
  long prev = 1 << 30;
  for (int a = 0; a <= 3; ++a) {
    const auto labels = classify_frames(b, {.aggressiveness = a});
    const long n = std::count(labels.begin(), labels.end(), FrameLabel::speech);
    EXPECT_LE(n, prev) << a;
    prev = n;
  }
}

TEST(Config, Validation) {
  EXPECT_THROW(VadConfig{.aggressiveness = 4}.validate(), std::invalid_argument);
  EXPECT_THROW(VadConfig{.frame_ms = 25}.validate(), std::invalid_argument);
  EXPECT_THROW((VadConfig{.min_segment_s = 20, .max_segment_s = 20}).validate(), std::invalid_argument);
}

TEST(Detect, SilenceGivesNothing) {
  for (double s : {0.0, 0.5, 10.0}) {
    EXPECT_TRUE(detect_candidates(AudioBuffer(silence(s, kRate), kRate), {}).empty());
  }
}

TEST(Detect, ToneIsPadded) {
  std::vector<float> v = silence(2.0, kRate);
  append(v, tone(3.0, kRate, 440, 0.3f));
  append(v, silence(3.0, kRate));
  const auto c = detect_candidates(AudioBuffer(v, kRate), {});
  ASSERT_EQ(c.size(), 1u);
  // Frames are 30 ms, so the detected edges are quantized to that grid.
  EXPECT_NEAR(c[0].start_s(), 1.9, 0.03);
  EXPECT_NEAR(c[0].end_s(), 5.1, 0.03);
}

TEST(Detect, GapSweep) {
  EXPECT_EQ(detect_candidates(tones_with_gap(1.0), {}).size(), 2u);
  EXPECT_EQ(detect_candidates(tones_with_gap(0.1), {}).size(), 1u);
  std::size_t prev = 1;
  for (double gap = 0.05; gap <= 1.5; gap += 0.05) {
    const auto n = detect_candidates(tones_with_gap(gap), {}).size();
    EXPECT_GE(n, prev) << gap;
    prev = n;
  }
}

TEST(Detect, SortedDisjointAndLengthFiltered) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    auto book = fixtures::make_book({.sentences = 8, .seed = static_cast<std::uint64_t>(trial)});
    const VadConfig cfg;
    const auto c = detect_candidates(book.audio, cfg);
    ASSERT_FALSE(c.empty());
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_GE(c[i].duration_s(), cfg.min_segment_s);
      EXPECT_LE(c[i].end_ms(), book.audio.duration_ms());
      if (i > 0) {
        EXPECT_LE(c[i - 1].end_ms(), c[i].start_ms());
      }
    }
  }
}

TEST(Spans, EverySpeechFrameCovered) {
  std::mt19937 rng(9);
  const VadConfig cfg{.max_segment_s = 3.0};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FrameLabel> labels(500);
    for (auto& l : labels) l = (rng() % 3 == 0) ? FrameLabel::speech : FrameLabel::non_speech;
    const auto spans = spans_from_labels(labels, 500 * 30, cfg);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != FrameLabel::speech) continue;
      const std::int64_t a = static_cast<std::int64_t>(i) * 30, b = a + 30;
      const bool covered = std::any_of(spans.begin(), spans.end(), [&](const TimeSpan& s) {
        return s.start_ms() <= a && b <= s.end_ms();
      });
      ASSERT_TRUE(covered) << "trial " << trial << " frame " << i;
    }
    for (std::size_t i = 1; i < spans.size(); ++i) ASSERT_LE(spans[i - 1].end_ms(), spans[i].start_ms());
  }
}

TEST(Spans, MonotoneInMinSilence) {
  std::mt19937 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrameLabel> labels(400);
    for (auto& l : labels) l = (rng() % 4 != 0) ? FrameLabel::speech : FrameLabel::non_speech;
    std::size_t prev = SIZE_MAX;
    for (int ms = 30; ms <= 600; ms += 30) {
      const auto n = spans_from_labels(labels, 400 * 30, {.min_silence_ms = ms, .max_segment_s = 1000}).size();
      EXPECT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(Spans, LongRunSplitsAtLongestPauseEarliestTie) {
  // Speech 0-6 s, pause 300 ms, speech, pause 600 ms, speech, pause 600 ms, speech.
  std::vector<FrameLabel> labels;
  auto add = [&](int frames, FrameLabel l) { labels.insert(labels.end(), frames, l); };
  add(100, FrameLabel::speech);
  add(10, FrameLabel::non_speech);
  add(100, FrameLabel::speech);
  add(20, FrameLabel::non_speech);
  add(100, FrameLabel::speech);
  add(20, FrameLabel::non_speech);
  add(100, FrameLabel::speech);
  const VadConfig cfg{.min_silence_ms = 1000, .max_segment_s = 10.0, .padding_ms = 0};
  const auto spans = spans_from_labels(labels, static_cast<std::int64_t>(labels.size()) * 30, cfg);
  // 13.5 s total exceeds 10 s; the first 600 ms pause (frames 210-230) is cut first.
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0], TimeSpan::from_ms(0, 210 * 30));
  EXPECT_EQ(spans[1], TimeSpan::from_ms(230 * 30, 450 * 30));
}

}  // namespace
}  // namespace ttscorpus::vad
