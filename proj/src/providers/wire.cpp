#include "ttscorpus/providers/wire.hpp"

#include <openssl/evp.h>

#include <cmath>

#include "ttscorpus/audio/wav.hpp"
#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::providers::wire {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw ProviderError("malformed provider payload: " + what, false);
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ProviderError&) {
    throw;
  } catch (const std::exception& e) {
    malformed(e.what());
  }
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) malformed("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) malformed("invalid base64");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

json audio_request(const AudioBuffer& audio) {
  return {{"pcm_base64", base64_encode(audio::to_pcm16le(audio))},
          {"sample_rate", audio.sample_rate_hz()}};
}

AudioBuffer decode_audio_request(const json& body) {
  return guarded([&] {
    const auto bytes = base64_decode(body.at("pcm_base64").get<std::string>());
    return audio::from_pcm16le(bytes, body.at("sample_rate").get<int>());
  });
}

json text_request(std::string_view text) { return {{"text", std::string(text)}}; }

std::string decode_text_request(const json& body) {
  return guarded([&] { return body.at("text").get<std::string>(); });
}

json encode(const Transcription& t) {
  return {{"text", t.text}, {"confidence", t.confidence ? json(*t.confidence) : json(nullptr)}};
}

json encode(const CompletenessVerdict& v) {
  return {{"is_complete", v.is_complete}, {"score", v.score}};
}

json encode(const Embedding& e) { return {{"vector", e.values()}}; }

json encode(const std::vector<MusicSpan>& spans) {
  json items = json::array();
  for (const auto& s : spans) {
    items.push_back(
        {{"start_s", s.span.start_s()}, {"end_s", s.span.end_s()}, {"kind", to_string(s.kind)}});
  }
  return {{"spans", items}};
}

json encode_punctuated(std::string_view text) { return {{"text", std::string(text)}}; }

Transcription decode_transcription(const json& body) {
  return guarded([&] {
    Transcription t;
    t.text = text::nfc(body.at("text").get<std::string>());
    if (body.contains("confidence") && !body.at("confidence").is_null()) {
      const double c = body.at("confidence").get<double>();
      if (!(c >= 0.0 && c <= 1.0)) malformed("confidence outside [0, 1]");
      t.confidence = c;
    }
    return t;
  });
}

CompletenessVerdict decode_completeness(const json& body) {
  return guarded([&] {
    const double score = body.at("score").get<double>();
    if (!(score >= 0.0 && score <= 1.0)) malformed("score outside [0, 1]");
    const bool complete = body.at("is_complete").get<bool>();
    if (complete != (score >= kCompletenessCut)) malformed("is_complete disagrees with score");
    return CompletenessVerdict{complete, score};
  });
}

Embedding decode_embedding(const json& body) {
  return guarded([&] {
    auto values = body.at("vector").get<std::vector<double>>();
    for (double v : values) {
      if (!std::isfinite(v)) malformed("non-finite embedding component");
    }
    Embedding e(std::move(values));
    if (!e.valid()) malformed("embedding has zero norm");
    return e;
  });
}

std::vector<MusicSpan> decode_music(const json& body) {
  return guarded([&] {
    std::vector<MusicSpan> spans;
    for (const json& s : body.at("spans")) {
      spans.push_back({TimeSpan::from_seconds(s.at("start_s").get<double>(),
                                              s.at("end_s").get<double>()),
                       music_kind_from_string(s.at("kind").get<std::string>())});
    }
    return spans;
  });
}

std::string decode_punctuated(const json& body) {
  return guarded([&] { return body.at("text").get<std::string>(); });
}

}  // namespace ttscorpus::providers::wire
