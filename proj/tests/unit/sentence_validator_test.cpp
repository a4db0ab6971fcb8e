#include <gtest/gtest.h>

#include "ttscorpus/providers/mock.hpp"
#include "ttscorpus/segmentation/sentence_validator.hpp"
#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::segmentation {
namespace {

using providers::ProviderError;
using providers::RecordingScript;
using providers::RuleCompleteness;
using providers::ScriptedAsr;
using providers::ScriptLibrary;

constexpr int kRate = 16000;

/// Sentence "w0 w1 w2." whose last word ends at `sentence_end_ms`.
std::shared_ptr<ScriptLibrary> sentence_ending_at(std::int64_t sentence_end_ms) {
  RecordingScript s;
  s.words = {{TimeSpan::from_ms(1000, 1400), "یک"},
             {TimeSpan::from_ms(1500, 1900), "دو"},
             {TimeSpan::from_ms(2000, sentence_end_ms), "سه."}};
  auto lib = std::make_shared<ScriptLibrary>();
  lib->add("r", s);
  return lib;
}

AudioBuffer quiet(double seconds) {
  return AudioBuffer(std::vector<float>(static_cast<std::size_t>(seconds * kRate)), kRate);
}

class FailingAsr : public providers::AsrProvider {
 public:
  providers::Transcription transcribe(const AudioBuffer&, const providers::ClipInfo&) override {
    throw ProviderError("backend down", true);
  }
};

TEST(Policy, Validation) {
  EXPECT_EQ(ExtensionPolicy{}.max_extensions(), 50);
  EXPECT_EQ(ExtensionPolicy{}.step_ms(), 100);
  EXPECT_THROW(ExtensionPolicy{.step_s = 0}.validate(), std::invalid_argument);
  EXPECT_THROW((ExtensionPolicy{.step_s = 0.5, .max_total_extension_s = 0.2}).validate(), std::invalid_argument);
  EXPECT_EQ(extension_direction_from_string(to_string(ExtensionDirection::both)), ExtensionDirection::both);
}

TEST(Validate, SentenceInsideNeedsNoExtension) {
  ScriptedAsr asr(sentence_ending_at(2500));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(900, 3000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::complete);
  EXPECT_EQ(r.extensions, 0);
  EXPECT_EQ(r.asr_calls, 1);
  EXPECT_EQ(r.segment.transcript, "یک دو سه.");
  EXPECT_EQ(r.segment.span, TimeSpan::from_ms(900, 3000));
}

TEST(Validate, ThreeExtensionsForPointThreeSeconds) {
  ScriptedAsr asr(sentence_ending_at(3300));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(900, 3000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::complete);
  EXPECT_EQ(r.extensions, 3);
  EXPECT_EQ(r.asr_calls, 4);
  EXPECT_EQ(r.segment.span, TimeSpan::from_ms(900, 3300));
}

TEST(Validate, SixSecondsPastIsRejected) {
  ScriptedAsr asr(sentence_ending_at(9000));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(900, 3000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::rejected);
  EXPECT_EQ(r.cause, "budget");
  EXPECT_EQ(r.asr_calls, 51);
  EXPECT_EQ(r.extensions, 50);
}

TEST(Validate, ExactlyFiveSecondsStillFits) {
  ScriptedAsr asr(sentence_ending_at(8000));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(900, 3000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::complete);
  EXPECT_EQ(r.extensions, 50);
}

TEST(Validate, EmptyTranscriptKeepsExtendingThenRejects) {
  auto lib = std::make_shared<ScriptLibrary>();
  lib->add("r", {});
  ScriptedAsr asr(lib);
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(0, 2000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::rejected);
  EXPECT_EQ(r.cause, "empty_transcript");
  EXPECT_EQ(r.asr_calls, 51);
}

TEST(Validate, MaxLengthRejects) {
  ScriptedAsr asr(sentence_ending_at(9000));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(900, 3000), asr, clf,
                                  {.max_segment_s = 3.0});
  EXPECT_EQ(r.segment.completeness, Completeness::rejected);
  EXPECT_EQ(r.cause, "max_length");
  EXPECT_LE(r.segment.span.duration_ms(), 3100);
}

TEST(Validate, EndOfAudioRejects) {
  ScriptedAsr asr(sentence_ending_at(9000));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(4.0), "r", TimeSpan::from_ms(900, 3000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::rejected);
  EXPECT_EQ(r.cause, "end_of_audio");
  EXPECT_EQ(r.segment.span.end_ms(), 4000);
}

TEST(Validate, ProviderFailureRejectsWithCause) {
  FailingAsr asr;
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(10), "r", TimeSpan::from_ms(900, 3000), asr, clf);
  EXPECT_EQ(r.segment.completeness, Completeness::rejected);
  EXPECT_NE(r.cause.find("backend down"), std::string::npos);
}

TEST(Validate, BothDirectionsGrowStartToo) {
  ScriptedAsr asr(sentence_ending_at(3200));
  RuleCompleteness clf;
  const auto r = validate_segment(quiet(30), "r", TimeSpan::from_ms(900, 3000), asr, clf,
                                  {.direction = ExtensionDirection::both});
  EXPECT_EQ(r.segment.completeness, Completeness::complete);
  EXPECT_EQ(r.segment.span, TimeSpan::from_ms(700, 3200));
}

/// Records every span the validator asks about.
class RecordingAsr : public providers::AsrProvider {
 public:
  explicit RecordingAsr(std::shared_ptr<const ScriptLibrary> lib) : inner_(std::move(lib)) {}
  providers::Transcription transcribe(const AudioBuffer& a, const providers::ClipInfo& c) override {
    spans.push_back(c.span);
    auto t = inner_.transcribe(a, c);
    words.push_back(text::comparison_words(t.text).size());
    return t;
  }
  std::vector<TimeSpan> spans;
  std::vector<std::size_t> words;

 private:
  ScriptedAsr inner_;
};

TEST(Validate, SpansGrowStrictlyAndWordsNeverShrink) {
  for (auto dir : {ExtensionDirection::end, ExtensionDirection::both}) {
    RecordingAsr asr(sentence_ending_at(6100));
    RuleCompleteness clf;
    validate_segment(quiet(30), "r", TimeSpan::from_ms(1200, 1600), asr, clf, {.direction = dir});
    ASSERT_GT(asr.spans.size(), 2u);
    for (std::size_t i = 1; i < asr.spans.size(); ++i) {
      EXPECT_TRUE(asr.spans[i].contains(asr.spans[i - 1]));
      EXPECT_NE(asr.spans[i], asr.spans[i - 1]);
      EXPECT_GE(asr.words[i], asr.words[i - 1]);
    }
  }
}

}  // namespace
}  // namespace ttscorpus::segmentation
