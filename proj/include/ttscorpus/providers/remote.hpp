#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::providers {

struct RemoteConfig {
  std::string base_url = "http://127.0.0.1:8080";
  int max_in_flight = 8;
  int attempts = 3;
  int initial_backoff_ms = 250;
  int max_retry_after_ms = 30000;
  int timeout_ms = 60000;
};

/// HTTP client for the inference protocol. Safe for concurrent use; at most
/// `max_in_flight` requests are outstanding at once. Transport errors, 5xx
/// and 503 + Retry-After are retried with exponential backoff; 4xx and
/// malformed bodies fail immediately.
class RemoteProviders final : public AsrProvider,
                              public CompletenessProvider,
                              public PunctuationProvider,
                              public SpeakerEmbeddingProvider,
                              public MusicProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteProviders(RemoteConfig config, Sleeper sleeper = {});

  Transcription transcribe(const AudioBuffer& audio, const ClipInfo& clip) override;
  CompletenessVerdict check_completeness(std::string_view text) override;
  std::string restore_punctuation(std::string_view text) override;
  Embedding embed_speaker(const AudioBuffer& audio, const ClipInfo& clip) override;
  std::vector<MusicSpan> detect_music(const AudioBuffer& audio) override;

  long requests_sent() const { return requests_.load(); }
  int peak_in_flight() const { return peak_in_flight_.load(); }

 private:
  nlohmann::json post(std::string_view path, const nlohmann::json& body);

  RemoteConfig config_;
  Sleeper sleeper_;
  std::counting_semaphore<1024> slots_;
  std::atomic<long> requests_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_in_flight_{0};
};

/// Builds a ProviderSet whose five capabilities all go to one remote client.
ProviderSet make_remote_providers(const RemoteConfig& config);

}  // namespace ttscorpus::providers
