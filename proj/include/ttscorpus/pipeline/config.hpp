#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/providers/mock.hpp"
#include "ttscorpus/providers/remote.hpp"
#include "ttscorpus/quality/audio_quality.hpp"
#include "ttscorpus/quality/text_quality.hpp"
#include "ttscorpus/segmentation/sentence_validator.hpp"
#include "ttscorpus/speaker/diarization.hpp"
#include "ttscorpus/trim/boundary_optimizer.hpp"
#include "ttscorpus/vad/vad.hpp"

namespace ttscorpus::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProviderMode { mock, remote };
std::string_view to_string(ProviderMode m);
ProviderMode provider_mode_from_string(std::string_view s);

struct MockSettings {
  providers::SyntheticSpeakerConfig speaker;
  providers::FlatnessConfig music;
  std::set<std::string> final_words;
};

struct ProvidersConfig {
  ProviderMode mode = ProviderMode::mock;
  providers::RemoteConfig remote;
  MockSettings mock;
};

struct OutputConfig {
  int sample_rate_hz = 16000;
};

struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  int worker_count = 1;
  std::uint64_t random_seed = 0;

  vad::VadConfig vad;
  segmentation::ExtensionPolicy segmentation;
  trim::TrimSearchConfig trim;
  quality::TextQualityConfig text_quality;
  quality::AudioQualityConfig audio_quality;
  speaker::SpeakerConfig speaker;
  TtsFilter tts_filter;
  ProvidersConfig providers;
  OutputConfig output;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Environment variable that replaces providers.remote.base_url.
inline constexpr const char* kProviderUrlEnv = "TTSCORPUS_PROVIDER_URL";

/// Parses a JSON config. Unknown keys are errors. Relative paths resolve
/// against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const PipelineConfig& config);
/// Reads, parses, applies the environment override and validates.
PipelineConfig load_config(const std::filesystem::path& path);

/// SHA-256 (hex) of the canonical JSON of every setting that can change
/// results: paths and worker_count are excluded, as are remote connection
/// settings.
std::string config_hash(const PipelineConfig& config);

std::string sha256_hex(std::string_view bytes);

}  // namespace ttscorpus::pipeline
