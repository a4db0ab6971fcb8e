#include "ttscorpus/pipeline/run.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "ttscorpus/audio/dsp.hpp"
#include "ttscorpus/audio/wav.hpp"
#include "ttscorpus/corpus/manifest.hpp"
#include "ttscorpus/corpus/stats.hpp"
#include "ttscorpus/providers/mock.hpp"
#include "ttscorpus/providers/remote.hpp"
#include "ttscorpus/quality/audio_quality.hpp"
#include "ttscorpus/quality/text_quality.hpp"
#include "ttscorpus/segmentation/sentence_validator.hpp"
#include "ttscorpus/speaker/diarization.hpp"
#include "ttscorpus/trim/boundary_optimizer.hpp"
#include "ttscorpus/vad/vad.hpp"

namespace ttscorpus::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sanitize_id(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    out += ok ? static_cast<char>(c) : '_';
  }
  return out.empty() ? "_" : out;
}

std::vector<InputRecording> discover_recordings(const fs::path& input_dir) {
  std::error_code ec;
  if (!fs::is_directory(input_dir, ec)) {
    throw ConfigError("input_dir " + input_dir.string() + " is not a directory");
  }
  std::vector<InputRecording> found;
  for (const auto& entry : fs::recursive_directory_iterator(input_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".wav") continue;
    found.push_back({"", entry.path(), fs::relative(entry.path(), input_dir).generic_string()});
  }
  if (found.empty()) throw ConfigError("input_dir " + input_dir.string() + " holds no .wav recordings");
  std::sort(found.begin(), found.end(),
            [](const InputRecording& a, const InputRecording& b) { return a.relative < b.relative; });
  std::map<std::string, int> used;
  for (auto& r : found) {
    std::string rel = r.relative.substr(0, r.relative.size() - 4);
    std::string id = sanitize_id(rel);
    if (const int n = used[id]++; n > 0) id += "_" + std::to_string(n + 1);
    r.recording_id = id;
  }
  return found;
}

namespace {

fs::path sibling(const fs::path& recording, std::string_view suffix) {
  fs::path p = recording;
  p.replace_extension();
  p += std::string(suffix);
  return p;
}

}  // namespace

std::vector<std::string> read_narrators(const fs::path& recording) {
  std::ifstream in(sibling(recording, ".meta.json"));
  if (!in) return {};
  try {
    const json j = json::parse(in);
    return j.value("narrators", std::vector<std::string>{});
  } catch (const json::exception& e) {
    spdlog::warn("ignoring malformed metadata for {}: {}", recording.string(), e.what());
    return {};
  }
}

providers::ProviderSet make_providers(const PipelineConfig& config,
                                      const std::vector<InputRecording>& recordings) {
  if (config.providers.mode == ProviderMode::remote) {
    return providers::make_remote_providers(config.providers.remote);
  }
  auto scripts = std::make_shared<providers::ScriptLibrary>();
  for (const auto& r : recordings) {
    const fs::path script = sibling(r.path, ".script.json");
    if (fs::exists(script)) {
      scripts->add(r.recording_id, providers::ScriptLibrary::load_script_file(script));
    } else {
      spdlog::warn("mock mode: no script for {}; its transcripts will be empty", r.relative);
    }
  }
  const auto& m = config.providers.mock;
  auto mocks = providers::make_mock_providers(scripts, m.speaker, m.music);
  mocks.completeness = std::make_shared<providers::RuleCompleteness>(m.final_words);
  return mocks.as_set();
}

int RunResult::exit_code() const {
  if (report.recordings > 0 && report.failed_recordings == report.recordings) return 2;
  return 0;
}

namespace {

struct Context {
  const PipelineConfig& config;
  const providers::ProviderSet& providers;
  std::string hash;
};

template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) f(i);
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    body();
    return;
  }
  std::mutex m;
  std::exception_ptr first;
  auto guarded = [&] {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(m);
      if (!first) first = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(guarded);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

AudioBuffer working_audio(const fs::path& path, const PipelineConfig& config) {
  return audio::resample(audio::decode(path), config.audio_quality.working_rate_hz);
}

void add_flag(Segment& s, std::string flag) {
  if (std::find(s.flags.begin(), s.flags.end(), flag) == s.flags.end()) s.flags.push_back(std::move(flag));
}

void stage_segment(RecordingState& st, const AudioBuffer& work, const Context& ctx) {
  st.candidates = vad::detect_candidates(work, ctx.config.vad);
}

void stage_validate(RecordingState& st, const AudioBuffer& work, const Context& ctx) {
  const std::int64_t min_ms = std::llround(ctx.config.vad.min_segment_s * 1000.0);
  std::int64_t prev_end = 0;
  for (const TimeSpan& c : st.candidates) {
    TimeSpan span = c;
    if (c.start_ms() < prev_end) {
      if (c.end_ms() - prev_end < std::max<std::int64_t>(min_ms, 1)) {
        st.segments.push_back({.source_id = st.recording_id, .span = c,
                               .completeness = Completeness::rejected});
        st.causes.push_back("overlap");
        continue;
      }
      span = TimeSpan::from_ms(prev_end, c.end_ms());
    }
    auto r = segmentation::validate_segment(work, st.recording_id, span, *ctx.providers.asr,
                                            *ctx.providers.completeness, ctx.config.segmentation);
    if (r.segment.completeness == Completeness::complete) prev_end = r.segment.span.end_ms();
    st.segments.push_back(std::move(r.segment));
    st.causes.push_back(std::move(r.cause));
  }
}

void stage_optimize(RecordingState& st, const AudioBuffer& work, const Context& ctx) {
  parallel_for(st.segments.size(), ctx.config.worker_count, [&](std::size_t i) {
    Segment& s = st.segments[i];
    if (s.completeness != Completeness::complete) return;
    trim::apply_trim(s, trim::optimize_segment(work, s, *ctx.providers.asr, ctx.config.trim));
  });
}

void stage_score(RecordingState& st, const AudioBuffer& work, const Context& ctx) {
  parallel_for(st.segments.size(), ctx.config.worker_count, [&](std::size_t i) {
    Segment& s = st.segments[i];
    if (s.completeness != Completeness::complete) return;
    const auto text = quality::score_text(s.transcript, ctx.config.text_quality);
    const auto audio = quality::score_audio(audio::slice(work, s.span), *ctx.providers.music,
                                            ctx.config.audio_quality);
    s.quality = QualityReport{text.subscores, text.total, text.category,
                              audio.subscores, audio.total, audio.category};
    for (const auto& f : audio.flags) add_flag(s, f);
  });
}

void stage_label(RecordingState& st, const AudioBuffer& work, const Context& ctx) {
  const auto& cfg = ctx.config.speaker;
  st.embeddings.assign(st.segments.size(), std::nullopt);
  std::vector<std::size_t> idx;
  std::vector<providers::Embedding> embs;
  for (std::size_t i = 0; i < st.segments.size(); ++i) {
    Segment& s = st.segments[i];
    if (s.completeness != Completeness::complete) continue;
    try {
      auto e = ctx.providers.embedder->embed_speaker(audio::slice(work, s.span),
                                                     {st.recording_id, s.span});
      if (!e.valid()) throw providers::ProviderError("invalid embedding", false);
      st.embeddings[i] = e;
      idx.push_back(i);
      embs.push_back(std::move(e));
    } catch (const providers::ProviderError& e) {
      add_flag(s, "embedding_failed");
      spdlog::debug("{}: no embedding for segment {}: {}", st.recording_id, i, e.what());
    }
  }
  st.k_star = 0;
  if (embs.empty()) return;
  if (embs.size() == 1) {
    st.segments[idx[0]].speaker = SpeakerAssignment{0, 1.0, std::nullopt};
    st.k_star = 1;
    st.cluster_method = std::string(speaker::to_string(speaker::ClusterMethod::agglomerative));
    return;
  }
  const auto pre = speaker::preprocess_embeddings(embs, cfg.preprocess);
  const int k_max = speaker::k_max_for(pre.points.size(), cfg);
  int k = 1;
  if (k_max >= 2 && pre.points.size() > 2) {
    k = speaker::estimate_k(pre.points, 2, k_max, cfg.hdbscan_min_cluster_size).k_star;
  }
  const auto local = speaker::cluster_local(pre.points, k, cfg.confidence_floor);
  st.k_star = local.k_star;
  st.cluster_method = std::string(speaker::to_string(local.method));
  std::vector<bool> kept(embs.size(), false);
  for (std::size_t p = 0; p < pre.kept.size(); ++p) {
    const std::size_t i = idx[pre.kept[p]];
    kept[pre.kept[p]] = true;
    st.segments[i].speaker = SpeakerAssignment{local.labels[p], local.confidences[p], std::nullopt};
    if (!local.assigned[p]) add_flag(st.segments[i], "speaker_low_confidence");
  }
  for (std::size_t e = 0; e < embs.size(); ++e) {
    if (kept[e]) continue;
    st.segments[idx[e]].speaker = SpeakerAssignment{-1, 0.0, std::nullopt};
    add_flag(st.segments[idx[e]], "speaker_outlier");
  }
}

using StageFn = void (*)(RecordingState&, const AudioBuffer&, const Context&);
constexpr StageFn kLocalStages[] = {stage_segment, stage_validate, stage_optimize, stage_score,
                                    stage_label};

/// Advances a recording through the per-recording stages, checkpointing
/// after each one.
void advance_local(RecordingState& st, std::optional<Stage> reached, const fs::path& source,
                   const Context& ctx, Stage last) {
  std::optional<AudioBuffer> work;
  for (int s = 0; s <= static_cast<int>(last); ++s) {
    if (reached && s <= static_cast<int>(*reached)) continue;
    if (!work) work = working_audio(source, ctx.config);
    kLocalStages[s](st, *work, ctx);
    st.stage = static_cast<Stage>(s);
    write_checkpoint(checkpoint_path(ctx.config.output_dir, st.recording_id), st, ctx.hash);
  }
}

/// Assigns global ids in place; no provider calls.
void assign_global_ids(std::vector<RecordingState*>& states, const PipelineConfig& config) {
  std::vector<speaker::LocalCluster> locals;
  for (RecordingState* st : states) {
    std::map<int, speaker::LocalCluster> by_label;
    for (std::size_t i = 0; i < st->segments.size(); ++i) {
      const Segment& s = st->segments[i];
      if (!s.speaker || !st->embeddings[i] || s.speaker->local_cluster < 0) continue;
      if (s.speaker->confidence < config.speaker.confidence_floor) continue;
      auto& lc = by_label[s.speaker->local_cluster];
      lc.recording_id = st->recording_id;
      lc.local_id = s.speaker->local_cluster;
      lc.members.push_back(*st->embeddings[i]);
      lc.weights.push_back(s.speaker->confidence);
    }
    for (auto& [label, lc] : by_label) locals.push_back(std::move(lc));
  }
  std::map<std::pair<std::string, int>, int> ids;
  if (!locals.empty()) {
    for (const auto& g : speaker::merge_global(locals, config.speaker.merge_threshold)) {
      for (const auto& m : g.members) ids[{m.recording_id, m.local_id}] = g.global_id;
    }
  }
  for (RecordingState* st : states) {
    for (Segment& s : st->segments) {
      if (!s.speaker) continue;
      auto it = ids.find({st->recording_id, s.speaker->local_cluster});
      const bool assigned = s.speaker->local_cluster >= 0 &&
                            s.speaker->confidence >= config.speaker.confidence_floor &&
                            it != ids.end();
      s.speaker->global_id = assigned ? std::optional<int>(it->second) : std::nullopt;
    }
  }
}

std::string wav_name(const std::string& id, const TimeSpan& span) {
  return "wavs/" + id + "/" + id + "_" + std::to_string(span.start_ms()) + "_" +
         std::to_string(span.end_ms()) + ".wav";
}

void finalize(RecordingState& st, const fs::path& source, const Context& ctx) {
  const auto original = audio::decode(source);
  st.tts_transcripts.assign(st.segments.size(), "");
  for (std::size_t i = 0; i < st.segments.size(); ++i) {
    Segment& s = st.segments[i];
    if (s.completeness != Completeness::complete) continue;
    s.audio_file = wav_name(st.recording_id, s.span);
    const auto clip = audio::resample(audio::slice(original, s.span), ctx.config.output.sample_rate_hz);
    const fs::path target = ctx.config.output_dir / s.audio_file;
    fs::create_directories(target.parent_path());
    audio::write_wav16(target, clip);
    if (passes_tts_filter(s, ctx.config.tts_filter)) {
      try {
        st.tts_transcripts[i] = ctx.providers.punctuation->restore_punctuation(s.transcript);
      } catch (const providers::ProviderError& e) {
        // Without restored punctuation the segment stays out of the subset.
        add_flag(s, "punctuation_failed");
        spdlog::warn("{}: punctuation failed: {}", st.recording_id, e.what());
      }
    }
  }
  st.stage = Stage::finalized;
  write_checkpoint(checkpoint_path(ctx.config.output_dir, st.recording_id), st, ctx.hash);
}

bool segment_order(const Segment& a, const Segment& b) {
  return std::make_tuple(std::cref(a.source_id), a.span.start_ms(), a.span.end_ms()) <
         std::make_tuple(std::cref(b.source_id), b.span.start_ms(), b.span.end_ms());
}

}  // namespace

RunResult run(const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  const auto recordings = discover_recordings(config.input_dir);
  const providers::ProviderSet providers =
      options.providers ? *options.providers : make_providers(config, recordings);
  const Context ctx{config, providers, config_hash(config)};
  fs::create_directories(config.output_dir / "checkpoints");
  spdlog::info("processing {} recordings with {} workers (config {})", recordings.size(),
               config.worker_count, ctx.hash.substr(0, 12));

  const std::size_t n = recordings.size();
  std::vector<std::optional<RecordingState>> states(n);
  std::vector<std::string> errors(n);
  const Stage last_local = options.stop_after && *options.stop_after < Stage::labeled
                               ? *options.stop_after
                               : Stage::labeled;

  parallel_for(n, config.worker_count, [&](std::size_t i) {
    const auto& rec = recordings[i];
    try {
      std::optional<RecordingState> cp;
      if (options.resume) cp = read_checkpoint(checkpoint_path(config.output_dir, rec.recording_id), ctx.hash);
      RecordingState st;
      std::optional<Stage> reached;
      if (cp && cp->source == rec.relative) {
        st = std::move(*cp);
        reached = st.stage;
      } else {
        st.recording_id = rec.recording_id;
        st.source = rec.relative;
        st.narrators = read_narrators(rec.path);
      }
      advance_local(st, reached, rec.path, ctx, last_local);
      states[i] = std::move(st);
    } catch (const std::exception& e) {
      errors[i] = rec.relative + ": " + e.what();
      spdlog::error("skipping {}: {}", rec.relative, e.what());
    }
  });

  RunResult result;
  for (const auto& e : errors) {
    if (!e.empty()) result.errors.push_back(e);
  }
  result.report.recordings = n;
  result.report.failed_recordings = result.errors.size();
  if (options.stop_after && *options.stop_after < Stage::labeled) {
    result.interrupted = true;
    return result;
  }

  std::vector<RecordingState*> live;
  for (auto& st : states) {
    if (st) live.push_back(&*st);
  }
  assign_global_ids(live, config);

  std::vector<std::string> final_errors(live.size());
  parallel_for(live.size(), config.worker_count, [&](std::size_t i) {
    RecordingState& st = *live[i];
    if (st.stage == Stage::finalized) return;
    const auto it = std::find_if(recordings.begin(), recordings.end(),
                                 [&](const InputRecording& r) { return r.recording_id == st.recording_id; });
    try {
      finalize(st, it->path, ctx);
    } catch (const std::exception& e) {
      final_errors[i] = it->relative + ": " + e.what();
      spdlog::error("skipping {} at finalization: {}", it->relative, e.what());
    }
  });
  std::vector<RecordingState*> done;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (final_errors[i].empty()) {
      done.push_back(live[i]);
    } else {
      result.errors.push_back(final_errors[i]);
    }
  }
  result.report.failed_recordings = result.errors.size();
  if (options.stop_after == Stage::finalized) {
    result.interrupted = true;
    return result;
  }

  std::vector<speaker::LabeledRecording> labeled;
  for (RecordingState* st : done) {
    result.report.candidates += st->candidates.size();
    speaker::LabeledRecording lr{st->recording_id, st->narrators, {}};
    for (std::size_t i = 0; i < st->segments.size(); ++i) {
      const Segment& s = st->segments[i];
      if (s.completeness != Completeness::complete) {
        ++result.report.rejected_segments;
        ++result.report.rejections_by_cause[st->causes[i]];
        continue;
      }
      result.full.segments.push_back(s);
      lr.global_ids.push_back(s.speaker ? s.speaker->global_id : std::nullopt);
      if (!st->tts_transcripts[i].empty()) {
        Segment t = s;
        t.transcript = st->tts_transcripts[i];
        result.tts.segments.push_back(std::move(t));
      }
    }
    labeled.push_back(std::move(lr));
  }
  std::sort(result.full.segments.begin(), result.full.segments.end(), segment_order);
  std::sort(result.tts.segments.begin(), result.tts.segments.end(), segment_order);
  result.full.kind = ManifestKind::full;
  result.tts.kind = ManifestKind::tts;
  result.full.pipeline_config_hash = result.tts.pipeline_config_hash = ctx.hash;
  result.full.stats = compute_stats(result.full.segments);
  result.tts.stats = compute_stats(result.tts.segments);
  result.report.before = result.full.stats;
  result.report.after = result.tts.stats;
  result.report.consistency = speaker::consistency_report(labeled);

  for (const auto* m : {&result.full, &result.tts}) {
    if (auto bad = check_invariants(*m, config.tts_filter)) {
      throw std::logic_error("manifest invariant violated: " + *bad);
    }
  }
  write_file_atomic(config.output_dir / "manifest.jsonl", serialize_manifest(result.full));
  write_file_atomic(config.output_dir / "manifest_tts.jsonl", serialize_manifest(result.tts));
  write_file_atomic(config.output_dir / "stats.json", report_to_json(result.report).dump(2) + "\n");
  write_file_atomic(config.output_dir / "stats.txt", render_report_text(result.report));
  spdlog::info("{} segments in full manifest, {} in TTS subset", result.full.segments.size(),
               result.tts.segments.size());
  return result;
}

}  // namespace ttscorpus::pipeline
