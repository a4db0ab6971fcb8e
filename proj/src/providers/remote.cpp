#include "ttscorpus/providers/remote.hpp"

#include <httplib.h>

#include <algorithm>
#include <thread>

#include "ttscorpus/providers/wire.hpp"

namespace ttscorpus::providers {

using nlohmann::json;

RemoteProviders::RemoteProviders(RemoteConfig config, Sleeper sleeper)
    : config_(std::move(config)),
      sleeper_(sleeper ? std::move(sleeper)
                       : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      slots_(std::clamp(config_.max_in_flight, 1, 1024)) {
  if (config_.attempts < 1) throw std::invalid_argument("remote attempts must be >= 1");
}

namespace {

/// The "error" member of an error body, or the raw body when it has none.
std::string error_text(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_object() && j.contains("error") && j["error"].is_string()) return j["error"];
  return body;
}

}  // namespace

json RemoteProviders::post(std::string_view path, const json& body) {
  const std::string payload = body.dump();
  std::string last_error = "no attempt made";
  int backoff_ms = config_.initial_backoff_ms;

  for (int attempt = 1; attempt <= config_.attempts; ++attempt) {
    int wait_ms = backoff_ms;
    {
      slots_.acquire();
      const int now = ++in_flight_;
      int peak = peak_in_flight_.load();
      while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
      }
      ++requests_;

      httplib::Client client(config_.base_url);
      const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      auto result = client.Post(std::string(path), payload, "application/json");

      --in_flight_;
      slots_.release();

      if (!result) {
        last_error = "transport error: " + httplib::to_string(result.error());
      } else if (result->status == 200) {
        try {
          return json::parse(result->body);
        } catch (const json::exception& e) {
          throw ProviderError(std::string(path) + " returned invalid JSON: " + e.what(), false);
        }
      } else if (result->status == 503) {
        last_error = "service overloaded (503)";
        if (result->has_header("Retry-After")) {
          try {
            const int seconds = std::stoi(result->get_header_value("Retry-After"));
            wait_ms = std::max(wait_ms, std::min(seconds * 1000, config_.max_retry_after_ms));
          } catch (const std::exception&) {
            // HTTP-date form is not used by the protocol; fall back to backoff.
          }
        }
      } else if (result->status >= 500) {
        last_error = "server error " + std::to_string(result->status);
      } else {
        throw ProviderError(std::string(path) + " rejected request with status " +
                                std::to_string(result->status) + ": " + error_text(result->body),
                            false);
      }
    }
    if (attempt < config_.attempts) {
      sleeper_(std::chrono::milliseconds(wait_ms));
      backoff_ms *= 2;
    }
  }
  throw ProviderError(std::string(path) + " unavailable after " +
                          std::to_string(config_.attempts) + " attempts: " + last_error,
                      true);
}

Transcription RemoteProviders::transcribe(const AudioBuffer& audio, const ClipInfo&) {
  return wire::decode_transcription(post(wire::kTranscribePath, wire::audio_request(audio)));
}

CompletenessVerdict RemoteProviders::check_completeness(std::string_view text) {
  return wire::decode_completeness(post(wire::kCompletenessPath, wire::text_request(text)));
}

std::string RemoteProviders::restore_punctuation(std::string_view text) {
  return wire::decode_punctuated(post(wire::kPunctuatePath, wire::text_request(text)));
}

Embedding RemoteProviders::embed_speaker(const AudioBuffer& audio, const ClipInfo&) {
  if (audio.duration_seconds() < 1.0) {
    throw ProviderError("speaker embedding needs at least 1 s of audio", false);
  }
  return wire::decode_embedding(post(wire::kEmbedPath, wire::audio_request(audio)));
}

std::vector<MusicSpan> RemoteProviders::detect_music(const AudioBuffer& audio) {
  if (audio.empty()) return {};
  return wire::decode_music(post(wire::kMusicPath, wire::audio_request(audio)));
}

ProviderSet make_remote_providers(const RemoteConfig& config) {
  auto client = std::make_shared<RemoteProviders>(config);
  return {client, client, client, client, client};
}

}  // namespace ttscorpus::providers
