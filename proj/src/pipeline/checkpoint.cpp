#include "ttscorpus/pipeline/checkpoint.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ttscorpus/corpus/manifest.hpp"

namespace ttscorpus::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {
constexpr int kCheckpointVersion = 1;
constexpr std::string_view kStageNames[] = {"segmented", "validated", "optimized",
                                            "scored",    "labeled",   "finalized"};
}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

Stage stage_from_string(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (kStageNames[i] == s) return static_cast<Stage>(i);
  }
  throw std::runtime_error("unknown stage " + std::string(s));
}

json state_to_json(const RecordingState& st, const std::string& config_hash) {
  json candidates = json::array();
  for (const auto& c : st.candidates) candidates.push_back({c.start_ms(), c.end_ms()});
  json segments = json::array();
  for (const auto& s : st.segments) segments.push_back(segment_to_json(s));
  json embeddings = json::array();
  for (const auto& e : st.embeddings) embeddings.push_back(e ? json(e->values()) : json(nullptr));
  return {{"format_version", kCheckpointVersion},
          {"config_hash", config_hash},
          {"recording_id", st.recording_id},
          {"source", st.source},
          {"narrators", st.narrators},
          {"stage", std::string(to_string(st.stage))},
          {"candidates_ms", candidates},
          {"segments", segments},
          {"causes", st.causes},
          {"embeddings", embeddings},
          {"k_star", st.k_star},
          {"cluster_method", st.cluster_method},
          {"tts_transcripts", st.tts_transcripts}};
}

RecordingState state_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kCheckpointVersion) {
      throw std::runtime_error("unsupported checkpoint version");
    }
    RecordingState st;
    st.recording_id = j.at("recording_id").get<std::string>();
    st.source = j.at("source").get<std::string>();
    st.narrators = j.at("narrators").get<std::vector<std::string>>();
    st.stage = stage_from_string(j.at("stage").get<std::string>());
    for (const auto& c : j.at("candidates_ms")) {
      st.candidates.push_back(TimeSpan::from_ms(c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>()));
    }
    for (const auto& s : j.at("segments")) st.segments.push_back(segment_from_json(s));
    st.causes = j.at("causes").get<std::vector<std::string>>();
    for (const auto& e : j.at("embeddings")) {
      if (e.is_null()) {
        st.embeddings.emplace_back();
      } else {
        st.embeddings.emplace_back(providers::Embedding(e.get<std::vector<double>>()));
      }
    }
    st.k_star = j.at("k_star").get<int>();
    st.cluster_method = j.at("cluster_method").get<std::string>();
    st.tts_transcripts = j.at("tts_transcripts").get<std::vector<std::string>>();
    return st;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
}

fs::path checkpoint_path(const fs::path& output_dir, const std::string& recording_id) {
  return output_dir / "checkpoints" / (recording_id + ".json");
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_checkpoint(const fs::path& path, const RecordingState& state,
                      const std::string& config_hash) {
  write_file_atomic(path, state_to_json(state, config_hash).dump() + "\n");
}

std::optional<RecordingState> read_checkpoint(const fs::path& path, const std::string& config_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    if (j.at("config_hash").get<std::string>() != config_hash) {
      spdlog::info("checkpoint {} was written under another config; ignoring", path.string());
      return std::nullopt;
    }
    return state_from_json(j);
  } catch (const std::exception& e) {
    spdlog::warn("ignoring unreadable checkpoint {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

}  // namespace ttscorpus::pipeline
