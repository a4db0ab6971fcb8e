#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::providers::wire {

// JSON bodies of the remote inference protocol. Audio travels as base64 of
// 16-bit little-endian mono PCM next to its sample rate:
//   {"pcm_base64": "...", "sample_rate": 16000}
// Decoders throw ProviderError(retryable = false) on malformed payloads.

inline constexpr std::string_view kTranscribePath = "/transcribe";
inline constexpr std::string_view kCompletenessPath = "/completeness";
inline constexpr std::string_view kEmbedPath = "/embed";
inline constexpr std::string_view kMusicPath = "/music";
inline constexpr std::string_view kPunctuatePath = "/punctuate";

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

nlohmann::json audio_request(const AudioBuffer& audio);
AudioBuffer decode_audio_request(const nlohmann::json& body);

nlohmann::json text_request(std::string_view text);
std::string decode_text_request(const nlohmann::json& body);

nlohmann::json encode(const Transcription& t);
nlohmann::json encode(const CompletenessVerdict& v);
nlohmann::json encode(const Embedding& e);
nlohmann::json encode(const std::vector<MusicSpan>& spans);
nlohmann::json encode_punctuated(std::string_view text);

Transcription decode_transcription(const nlohmann::json& body);
CompletenessVerdict decode_completeness(const nlohmann::json& body);
Embedding decode_embedding(const nlohmann::json& body);
std::vector<MusicSpan> decode_music(const nlohmann::json& body);
std::string decode_punctuated(const nlohmann::json& body);

}  // namespace ttscorpus::providers::wire
