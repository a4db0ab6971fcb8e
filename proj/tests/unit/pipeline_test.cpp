#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "corpus.hpp"
#include "schema_check.hpp"
#include "ttscorpus/audio/wav.hpp"
#include "ttscorpus/corpus/manifest.hpp"
#include "ttscorpus/corpus/stats.hpp"
#include "ttscorpus/pipeline/checkpoint.hpp"
#include "ttscorpus/pipeline/config.hpp"
#include "ttscorpus/pipeline/report.hpp"
#include "ttscorpus/pipeline/run.hpp"
#include "ttscorpus/providers/mock.hpp"

namespace ttscorpus::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("ttscorpus_") + info->test_suite_name() + "_" + info->name() + "_" +
             std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

PipelineConfig corpus_config(const fs::path& root, const fs::path& out_name = "out", int workers = 1) {
  fixtures::write_corpus(root / "input", fixtures::default_corpus());
  const auto text = fixtures::mock_config_json(root / "input", root / out_name, workers);
  auto c = config_from_json(json::parse(text));
  c.validate();
  return c;
}

long total_calls(const providers::ProviderSet& s) {
  long n = 0;
  for (const auto* p : {dynamic_cast<const providers::CallCounted*>(s.asr.get()),
                        dynamic_cast<const providers::CallCounted*>(s.completeness.get()),
                        dynamic_cast<const providers::CallCounted*>(s.punctuation.get()),
                        dynamic_cast<const providers::CallCounted*>(s.embedder.get()),
                        dynamic_cast<const providers::CallCounted*>(s.music.get())}) {
    if (p == nullptr) ADD_FAILURE() << "provider is not call-counted";
    else n += p->calls();
  }
  return n;
}

// ---- config ----------------------------------------------------------------

TEST(Config, DefaultsRoundTrip) {
  PipelineConfig c;
  c.input_dir = "/data/in";
  c.output_dir = "/data/out";
  const auto j = config_to_json(c);
  const auto back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_NO_THROW(back.validate());
}

TEST(Config, UnknownKeysAreRejected) {
  json j = {{"input_dir", "a"}, {"output_dir", "b"}, {"vad", {{"aggressivness", 2}}}};
  try {
    config_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("vad.aggressivness"), std::string::npos) << e.what();
  }
  EXPECT_THROW(config_from_json(json{{"colour", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
}

TEST(Config, TypeErrorsNameTheKey) {
  try {
    config_from_json(json{{"trim", {{"fine_step_s", "fast"}}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("trim.fine_step_s"), std::string::npos) << e.what();
  }
  EXPECT_THROW(config_from_json(json{{"providers", {{"mode", "cloud"}}}}), ConfigError);
}

TEST(Config, ValidationCatchesBadValues) {
  auto base = [] {
    PipelineConfig c;
    c.input_dir = "in";
    c.output_dir = "out";
    return c;
  };
  EXPECT_NO_THROW(base().validate());
  auto c = base();
  c.input_dir.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = base();
  c.worker_count = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base();
  c.tts_filter.audio_min = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base();
  c.output.sample_rate_hz = 100;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base();
  c.audio_quality.weights.snr = 0.9;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base();
  c.speaker.merge_threshold = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, HashIgnoresPathsWorkersAndConnection) {
  PipelineConfig a;
  a.input_dir = "x";
  a.output_dir = "y";
  PipelineConfig b = a;
  b.input_dir = "elsewhere";
  b.output_dir = "other";
  b.worker_count = 8;
  b.providers.remote.base_url = "http://10.0.0.1:9000";
  b.providers.remote.timeout_ms = 1;
  b.providers.remote.max_in_flight = 64;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.trim.fine_step_s = 0.2;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.random_seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.providers.mode = ProviderMode::remote;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 64u);
}

TEST(Config, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Config, LoadResolvesRelativePathsAndEnvOverride) {
  TempDir t;
  {
    std::ofstream f(t.path() / "c.json");
    f << json{{"input_dir", "in"},
              {"output_dir", "out"},
              {"random_seed", 9},
              {"providers", {{"mode", "remote"}, {"remote", {{"base_url", "http://a:1"}}}}}}
             .dump();
  }
  ::unsetenv(kProviderUrlEnv);
  auto c = load_config(t.path() / "c.json");
  EXPECT_EQ(c.input_dir, t.path() / "in");
  EXPECT_EQ(c.providers.remote.base_url, "http://a:1");
  EXPECT_EQ(c.providers.mock.speaker.seed, 9u);
  EXPECT_EQ(c.speaker.preprocess.reduction.seed, 9u);
  ::setenv(kProviderUrlEnv, "http://b:2", 1);
  c = load_config(t.path() / "c.json");
  ::unsetenv(kProviderUrlEnv);
  EXPECT_EQ(c.providers.remote.base_url, "http://b:2");

  EXPECT_THROW(load_config(t.path() / "missing.json"), ConfigError);
  std::ofstream(t.path() / "bad.json") << "{ not json";
  EXPECT_THROW(load_config(t.path() / "bad.json"), ConfigError);
}

TEST(Config, ProviderModeNames) {
  EXPECT_EQ(provider_mode_from_string("mock"), ProviderMode::mock);
  EXPECT_EQ(to_string(ProviderMode::remote), "remote");
  EXPECT_THROW(provider_mode_from_string("Mock"), ConfigError);
}

// ---- checkpoints -----------------------------------------------------------

RecordingState sample_state() {
  RecordingState s;
  s.recording_id = "book";
  s.source = "sub/book.wav";
  s.narrators = {"n"};
  s.stage = Stage::labeled;
  s.candidates = {TimeSpan::from_ms(0, 1000), TimeSpan::from_ms(1500, 4200)};
  Segment seg{.source_id = "book", .span = TimeSpan::from_ms(100, 900),
              .transcript = "سلام دنیا", .completeness = Completeness::complete};
  seg.quality = QualityReport{{0.9, 1.0, 0.8, 1.0}, 0.93, TextCategory::high,
                              {1, 1, 1, 0.7, 1, 1, 1, 1}, 0.964, AudioCategory::high};
  seg.trim = TrimLog{100, 0};
  seg.speaker = SpeakerAssignment{0, 0.75, 2};
  seg.flags = {"speaker_outlier"};
  Segment rej = seg;
  rej.span = TimeSpan::from_ms(1500, 4200);
  rej.completeness = Completeness::incomplete;
  rej.speaker.reset();
  s.segments = {seg, rej};
  s.causes = {"", "max_extensions"};
  s.embeddings = {providers::Embedding({0.25, -0.5, 1.0}), std::nullopt};
  s.k_star = 2;
  s.cluster_method = "spectral";
  s.tts_transcripts = {"سلام دنیا.", ""};
  return s;
}

TEST(Checkpoint, RoundTripsEveryField) {
  TempDir t;
  const auto s = sample_state();
  const auto p = checkpoint_path(t.path(), s.recording_id);
  write_checkpoint(p, s, "h1");
  const auto back = read_checkpoint(p, "h1");
  ASSERT_TRUE(back);
  EXPECT_EQ(state_to_json(*back, "h1"), state_to_json(s, "h1"));
  EXPECT_EQ(back->segments, s.segments);
  EXPECT_EQ(back->embeddings, s.embeddings);
  EXPECT_EQ(back->stage, Stage::labeled);
}

TEST(Checkpoint, OtherHashOrDamageMeansNone) {
  TempDir t;
  const auto p = checkpoint_path(t.path(), "book");
  EXPECT_FALSE(read_checkpoint(p, "h1"));
  write_checkpoint(p, sample_state(), "h1");
  EXPECT_FALSE(read_checkpoint(p, "h2"));
  write_file_atomic(p, "{\"truncated\": ");
  EXPECT_FALSE(read_checkpoint(p, "h1"));
  EXPECT_THROW(state_from_json(json{{"stage", "cooked"}}), std::runtime_error);
}

TEST(Checkpoint, AtomicWriteLeavesNoTemporaries) {
  TempDir t;
  write_file_atomic(t.path() / "a.txt", "one");
  write_file_atomic(t.path() / "a.txt", "two");
  EXPECT_EQ(slurp(t.path() / "a.txt"), "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(t.path())) ++files;
  EXPECT_EQ(files, 1u);
}

TEST(Checkpoint, StageNames) {
  for (auto s : {Stage::segmented, Stage::validated, Stage::optimized, Stage::scored, Stage::labeled,
                 Stage::finalized}) {
    EXPECT_EQ(stage_from_string(to_string(s)), s);
  }
  EXPECT_THROW(stage_from_string("done"), std::runtime_error);
}

// ---- report ----------------------------------------------------------------

TEST(Report, TextHasBothColumnsAndNaConsistency) {
  RunReport r;
  r.before.segment_count = 10;
  r.before.total_hours = 0.5;
  r.after.segment_count = 7;
  r.after.total_hours = 0.25;
  r.recordings = 2;
  r.rejections_by_cause["overlap"] = 3;
  const auto text = render_report_text(r);
  EXPECT_NE(text.find("Before Filtering"), std::string::npos);
  EXPECT_NE(text.find("After TTS Filtering"), std::string::npos);
  EXPECT_NE(text.find("n/a"), std::string::npos);
  EXPECT_NE(text.find("overlap: 3"), std::string::npos);
  const auto j = report_to_json(r);
  EXPECT_EQ(j.at("consistency"), "n/a");
  EXPECT_EQ(j.at("before_filtering").at("segment_count"), 10);
  EXPECT_EQ(j.at("after_tts_filtering").at("segment_count"), 7);

  r.consistency = speaker::ConsistencyReport{75.0, 3, 4, {}};
  EXPECT_NE(render_report_text(r).find("75.0% (3/4"), std::string::npos);
  EXPECT_DOUBLE_EQ(report_to_json(r).at("consistency").at("percentage"), 75.0);
}

// ---- discovery -------------------------------------------------------------

TEST(Discover, SortedRecursiveAndUnique) {
  TempDir t;
  const auto in = t.path() / "in";
  fs::create_directories(in / "b");
  for (const auto* name : {"z.wav", "b/a b.wav", "b_a b.WAV", "notes.txt"}) std::ofstream(in / name) << "x";
  const auto recs = discover_recordings(in);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].relative, "b/a b.wav");
  EXPECT_EQ(recs[0].recording_id, "b_a_b");
  EXPECT_EQ(recs[1].recording_id, "b_a_b_2");
  EXPECT_EQ(recs[2].recording_id, "z");
  // Works on bytes: the two-byte letter becomes two underscores.
  EXPECT_EQ(sanitize_id("ä.x-y_1"), "___x-y_1");
}

TEST(Discover, EmptyOrMissingDirectoryIsConfigError) {
  TempDir t;
  EXPECT_THROW(discover_recordings(t.path()), ConfigError);
  EXPECT_THROW(discover_recordings(t.path() / "nope"), ConfigError);
  PipelineConfig c;
  c.input_dir = t.path();
  c.output_dir = t.path() / "out";
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Discover, NarratorMetadata) {
  TempDir t;
  std::ofstream(t.path() / "a.meta.json") << R"({"narrators": ["x", "y"], "title": "T"})";
  EXPECT_EQ(read_narrators(t.path() / "a.wav"), (std::vector<std::string>{"x", "y"}));
  EXPECT_TRUE(read_narrators(t.path() / "b.wav").empty());
}

// ---- end to end ------------------------------------------------------------

TEST(Pipeline, MockCorpusProducesConsistentOutputs) {
  TempDir t;
  const auto c = corpus_config(t.path());
  const auto r = run(c);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_FALSE(r.interrupted);
  for (const auto* f : {"manifest.jsonl", "manifest_tts.jsonl", "stats.json", "stats.txt"}) {
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  }
  const auto full = read_manifest_file((c.output_dir / "manifest.jsonl").string());
  const auto tts = read_manifest_file((c.output_dir / "manifest_tts.jsonl").string());
  EXPECT_EQ(full, r.full);
  EXPECT_EQ(tts, r.tts);
  EXPECT_FALSE(check_invariants(full, c.tts_filter)) << *check_invariants(full, c.tts_filter);
  EXPECT_FALSE(check_invariants(tts, c.tts_filter)) << *check_invariants(tts, c.tts_filter);
  EXPECT_GT(full.segments.size(), 20u);
  EXPECT_EQ(full.pipeline_config_hash, config_hash(c));

  // Every TTS segment appears in the full manifest and passes the filter.
  std::set<std::tuple<std::string, std::int64_t, std::int64_t>> keys;
  for (const auto& s : full.segments) keys.emplace(s.source_id, s.span.start_ms(), s.span.end_ms());
  for (const auto& s : tts.segments) {
    EXPECT_TRUE(keys.count({s.source_id, s.span.start_ms(), s.span.end_ms()}));
    EXPECT_TRUE(passes_tts_filter(s, c.tts_filter));
  }
  for (const auto& s : full.segments) {
    EXPECT_EQ(s.completeness, Completeness::complete);
    EXPECT_TRUE(fs::exists(c.output_dir / s.audio_file)) << s.audio_file;
  }

  EXPECT_EQ(compute_stats(full.segments), full.stats);
  EXPECT_EQ(compute_stats(tts.segments), tts.stats);
  EXPECT_EQ(r.report.before, full.stats);
  EXPECT_EQ(r.report.after, tts.stats);
  EXPECT_EQ(r.report.recordings, 3u);
  EXPECT_EQ(r.report.candidates,
            r.full.segments.size() + r.report.rejected_segments);
  ASSERT_TRUE(r.report.consistency);
  EXPECT_DOUBLE_EQ(r.report.consistency->percentage, 100.0);
  EXPECT_EQ(full.stats.speaker_count, 3);

  const auto stats_json = json::parse(slurp(c.output_dir / "stats.json"));
  EXPECT_EQ(stats_json, report_to_json(r.report));
  EXPECT_EQ(slurp(c.output_dir / "stats.txt"), render_report_text(r.report));
}

TEST(Pipeline, ManifestLinesConformToSchemas) {
  TempDir t;
  const auto c = corpus_config(t.path());
  run(c);
  const auto header = fixtures::load_schema("manifest_header");
  const auto segment = fixtures::load_schema("manifest_segment");
  for (const auto* f : {"manifest.jsonl", "manifest_tts.jsonl"}) {
    std::istringstream in(slurp(c.output_dir / f));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto j = json::parse(line);
      EXPECT_EQ(fixtures::schema_violation(n == 0 ? header : segment, j), "") << f << ":" << n + 1;
      ++n;
    }
    EXPECT_GT(n, 1u);
  }
}

TEST(Pipeline, SegmentWavsMatchSourceSlices) {
  TempDir t;
  const auto c = corpus_config(t.path());
  const auto r = run(c);
  ASSERT_FALSE(r.full.segments.empty());
  const auto& s = r.full.segments.front();
  const auto clip = audio::decode(c.output_dir / s.audio_file);
  EXPECT_EQ(clip.sample_rate_hz(), c.output.sample_rate_hz);
  const auto expected = static_cast<std::size_t>(s.span.duration_ms() * c.output.sample_rate_hz / 1000);
  EXPECT_NEAR(static_cast<double>(clip.samples().size()), static_cast<double>(expected), 1.0);
}

TEST(Pipeline, TwoRunsAreByteIdentical) {
  TempDir t;
  auto c = corpus_config(t.path(), "a");
  run(c);
  auto c2 = c;
  c2.output_dir = t.path() / "b";
  c2.worker_count = 3;
  run(c2);
  for (const auto* f : {"manifest.jsonl", "manifest_tts.jsonl", "stats.json", "stats.txt"}) {
    EXPECT_EQ(slurp(c.output_dir / f), slurp(c2.output_dir / f)) << f;
  }
}

TEST(Pipeline, ResumeAfterInterruptionMatchesUninterrupted) {
  TempDir t;
  const auto c = corpus_config(t.path(), "whole");
  run(c);
  for (auto stage : {Stage::validated, Stage::scored, Stage::finalized}) {
    auto ci = c;
    ci.output_dir = t.path() / ("cut_" + std::string(to_string(stage)));
    RunOptions first;
    first.stop_after = stage;
    const auto partial = run(ci, first);
    EXPECT_TRUE(partial.interrupted);
    EXPECT_FALSE(fs::exists(ci.output_dir / "manifest.jsonl"));
    RunOptions again;
    again.resume = true;
    const auto resumed = run(ci, again);
    EXPECT_FALSE(resumed.interrupted);
    for (const auto* f : {"manifest.jsonl", "manifest_tts.jsonl", "stats.json"}) {
      EXPECT_EQ(slurp(c.output_dir / f), slurp(ci.output_dir / f)) << to_string(stage) << " " << f;
    }
  }
}

TEST(Pipeline, ResumeOfFinishedRunCallsNoProvider) {
  TempDir t;
  const auto c = corpus_config(t.path());
  const auto recs = discover_recordings(c.input_dir);
  RunOptions first;
  first.providers = make_providers(c, recs);
  run(c, first);
  EXPECT_GT(total_calls(*first.providers), 0);

  RunOptions again;
  again.resume = true;
  again.providers = make_providers(c, recs);
  const auto before = slurp(c.output_dir / "manifest.jsonl");
  run(c, again);
  EXPECT_EQ(total_calls(*again.providers), 0);
  EXPECT_EQ(slurp(c.output_dir / "manifest.jsonl"), before);
}

TEST(Pipeline, ChangedConfigInvalidatesCheckpoints) {
  TempDir t;
  auto c = corpus_config(t.path());
  const auto recs = discover_recordings(c.input_dir);
  run(c);
  c.trim.stability_threshold = 0.85;
  RunOptions again;
  again.resume = true;
  again.providers = make_providers(c, recs);
  run(c, again);
  EXPECT_GT(total_calls(*again.providers), 0);
}

TEST(Pipeline, StricterFilterShrinksSubset) {
  TempDir t;
  auto c = corpus_config(t.path());
  c.tts_filter.audio_min = 0.999;
  const auto r = run(c);
  EXPECT_LT(r.tts.segments.size(), r.full.segments.size());
  const auto& b = r.report.before;
  const auto& a = r.report.after;
  EXPECT_LE(a.total_hours, b.total_hours);
  EXPECT_LE(a.segment_count, b.segment_count);
  EXPECT_LE(a.trimmed_hours, b.trimmed_hours);
  EXPECT_LE(a.unique_words, b.unique_words);
  EXPECT_LE(a.total_tokens, b.total_tokens);
  EXPECT_LE(a.speaker_count, b.speaker_count);
  for (const auto& s : r.tts.segments) EXPECT_GE(s.quality->audio_total, 0.999);
}

TEST(Pipeline, BrokenRecordingIsSkipped) {
  TempDir t;
  auto c = corpus_config(t.path());
  std::ofstream(c.input_dir / "broken.wav") << "not a riff file";
  const auto r = run(c);
  EXPECT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.report.failed_recordings, 1u);
  EXPECT_GT(r.full.segments.size(), 0u);
}

TEST(Pipeline, AllRecordingsFailingExitsTwo) {
  TempDir t;
  fs::create_directories(t.path() / "in");
  std::ofstream(t.path() / "in" / "x.wav") << "junk";
  PipelineConfig c;
  c.input_dir = t.path() / "in";
  c.output_dir = t.path() / "out";
  const auto r = run(c);
  EXPECT_EQ(r.exit_code(), 2);
  EXPECT_TRUE(r.full.segments.empty());
}

}  // namespace
}  // namespace ttscorpus::pipeline
