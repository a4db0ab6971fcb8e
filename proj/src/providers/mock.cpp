#include "ttscorpus/providers/mock.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "ttscorpus/audio/dsp.hpp"
#include "ttscorpus/audio/spectrum.hpp"
#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::providers {

using nlohmann::json;

std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9E3779B97F4A7C15ull);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void ScriptLibrary::add(std::string source_id, RecordingScript script) {
  std::sort(script.words.begin(), script.words.end(), [](const ScriptWord& a, const ScriptWord& b) {
    return a.span.start_ms() < b.span.start_ms();
  });
  scripts_.insert_or_assign(std::move(source_id), std::move(script));
}

const RecordingScript* ScriptLibrary::find(std::string_view source_id) const {
  auto it = scripts_.find(source_id);
  return it == scripts_.end() ? nullptr : &it->second;
}

RecordingScript ScriptLibrary::script_from_json(const json& j) {
  RecordingScript script;
  for (const json& w : j.value("words", json::array())) {
    script.words.push_back({TimeSpan::from_seconds(w.at("start_s").get<double>(),
                                                   w.at("end_s").get<double>()),
                            text::nfc(w.at("text").get<std::string>())});
  }
  for (const json& s : j.value("speakers", json::array())) {
    script.speakers.push_back({TimeSpan::from_seconds(s.at("start_s").get<double>(),
                                                      s.at("end_s").get<double>()),
                               s.at("speaker").get<std::string>()});
  }
  std::sort(script.words.begin(), script.words.end(), [](const ScriptWord& a, const ScriptWord& b) {
    return a.span.start_ms() < b.span.start_ms();
  });
  return script;
}

json ScriptLibrary::script_to_json(const RecordingScript& script) {
  json words = json::array();
  for (const auto& w : script.words) {
    words.push_back({{"start_s", w.span.start_s()}, {"end_s", w.span.end_s()}, {"text", w.text}});
  }
  json speakers = json::array();
  for (const auto& s : script.speakers) {
    speakers.push_back(
        {{"start_s", s.span.start_s()}, {"end_s", s.span.end_s()}, {"speaker", s.speaker}});
  }
  return {{"words", words}, {"speakers", speakers}};
}

RecordingScript ScriptLibrary::load_script_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script " + path.string());
  return script_from_json(json::parse(in));
}

ScriptedAsr::ScriptedAsr(std::shared_ptr<const ScriptLibrary> scripts)
    : scripts_(std::move(scripts)) {}

Transcription ScriptedAsr::transcribe(const AudioBuffer& audio, const ClipInfo& clip) {
  count();
  if (audio.empty()) throw ProviderError("cannot transcribe empty audio", false);
  const RecordingScript* script = scripts_->find(clip.source_id);
  if (script == nullptr) return {"", std::nullopt};
  auto it = std::lower_bound(script->words.begin(), script->words.end(), clip.span.start_ms(),
                             [](const ScriptWord& w, std::int64_t t) { return w.span.start_ms() < t; });
  std::string text;
  for (; it != script->words.end() && it->span.start_ms() < clip.span.end_ms(); ++it) {
    if (!clip.span.contains(it->span)) continue;
    if (!text.empty()) text += ' ';
    text += it->text;
  }
  return {text::nfc(text), 1.0};
}

bool is_sentence_final_mark(char32_t c) {
  switch (c) {
    case U'.':
    case U'!':
    case U'?':
    case U'؟':  // Arabic question mark
    case U'…':  // ellipsis
    case U'۔':  // Arabic full stop
      return true;
    default:
      return false;
  }
}

namespace {

std::u32string right_trimmed(std::string_view text) {
  std::u32string cps = text::to_code_points(text::nfc(text));
  while (!cps.empty() && text::is_whitespace(cps.back())) cps.pop_back();
  return cps;
}

}  // namespace

RuleCompleteness::RuleCompleteness(std::set<std::string> final_words) {
  for (const auto& w : final_words) final_words_.insert(text::normalize_for_comparison(w));
}

CompletenessVerdict RuleCompleteness::check_completeness(std::string_view text) {
  count();
  const std::u32string cps = right_trimmed(text);
  if (cps.empty()) return verdict_from_score(0.0);
  if (is_sentence_final_mark(cps.back())) return verdict_from_score(0.95);
  const auto words = text::comparison_words(text);
  if (!words.empty() && final_words_.contains(words.back())) return verdict_from_score(0.9);
  return verdict_from_score(0.05);
}

std::string PeriodPunctuator::restore_punctuation(std::string_view text) {
  count();
  std::u32string cps = right_trimmed(text);
  if (!cps.empty() && !is_sentence_final_mark(cps.back())) cps.push_back(U'.');
  return text::to_utf8(cps);
}

SyntheticSpeakerEmbedder::SyntheticSpeakerEmbedder(std::shared_ptr<const ScriptLibrary> scripts,
                                                   SyntheticSpeakerConfig config)
    : scripts_(std::move(scripts)), config_(config) {}

Embedding SyntheticSpeakerEmbedder::center(std::string_view speaker) const {
  std::mt19937_64 rng(stable_hash(speaker, config_.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(config_.dimension);
  for (double& x : v) x = normal(rng);
  return Embedding(std::move(v)).normalized();
}

Embedding SyntheticSpeakerEmbedder::sample(std::string_view speaker,
                                           std::uint64_t utterance_key) const {
  const Embedding c = center(speaker);
  std::mt19937_64 rng(stable_hash(speaker, config_.seed) ^ (utterance_key * 0xBF58476D1CE4E5B9ull + 1));
  std::normal_distribution<double> normal(0.0, config_.spread);
  std::vector<double> v = c.values();
  for (double& x : v) x += normal(rng);
  return Embedding(std::move(v)).normalized();
}

std::string SyntheticSpeakerEmbedder::speaker_for(const ClipInfo& clip) const {
  const RecordingScript* script = scripts_ ? scripts_->find(clip.source_id) : nullptr;
  if (script == nullptr) return {};
  std::string best;
  std::int64_t best_overlap = 0;
  for (const auto& turn : script->speakers) {
    const std::int64_t overlap =
        std::min(turn.span.end_ms(), clip.span.end_ms()) -
        std::max(turn.span.start_ms(), clip.span.start_ms());
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = turn.speaker;
    }
  }
  return best;
}

Embedding SyntheticSpeakerEmbedder::embed_speaker(const AudioBuffer& audio, const ClipInfo& clip) {
  count();
  if (audio.duration_seconds() < 1.0) {
    throw ProviderError("speaker embedding needs at least 1 s of audio", false);
  }
  const std::string key = clip.source_id + ":" + std::to_string(clip.span.start_ms()) + ":" +
                          std::to_string(clip.span.end_ms());
  return sample(speaker_for(clip), stable_hash(key));
}

double spectral_flatness(std::span<const float> samples, int sample_rate_hz, std::size_t fft_size) {
  (void)sample_rate_hz;
  if (samples.empty()) return 1.0;
  audio::RealFft fft(fft_size);
  const std::size_t frame = std::min(fft_size, samples.size());
  const std::vector<double> window = audio::hann_window(frame);
  std::vector<double> average(fft.bins(), 0.0);
  std::vector<double> power;
  std::size_t frames = 0;
  const std::size_t hop = std::max<std::size_t>(1, frame / 2);
  for (std::size_t pos = 0; pos + frame <= samples.size(); pos += hop) {
    fft.power_spectrum(samples.subspan(pos, frame), window, power);
    for (std::size_t k = 0; k < power.size(); ++k) average[k] += power[k];
    ++frames;
  }
  double log_sum = 0.0;
  double sum = 0.0;
  for (std::size_t k = 1; k < average.size(); ++k) {
    const double p = average[k] / static_cast<double>(frames) + 1e-30;
    log_sum += std::log(p);
    sum += p;
  }
  const auto n = static_cast<double>(average.size() - 1);
  const double arithmetic = sum / n;
  if (arithmetic <= 1e-30) return 1.0;
  return std::exp(log_sum / n) / arithmetic;
}

FlatnessMusicDetector::FlatnessMusicDetector(FlatnessConfig config) : config_(config) {}

std::vector<MusicSpan> FlatnessMusicDetector::detect_music(const AudioBuffer& audio) {
  count();
  std::vector<MusicSpan> spans;
  if (audio.empty()) return spans;
  const int rate = audio.sample_rate_hz();
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config_.window_s * rate)));
  const std::size_t windows = std::max<std::size_t>(1, audio.size() / window);
  const auto samples = audio.samples();

  std::int64_t open_start = -1;
  std::int64_t last_end = 0;
  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t begin = w * window;
    const std::size_t end = w + 1 == windows ? audio.size() : begin + window;
    const auto chunk = samples.subspan(begin, end - begin);
    const bool music = audio::rms_dbfs(chunk) >= config_.silence_dbfs &&
                       spectral_flatness(chunk, rate, config_.fft_size) < config_.flatness_threshold;
    const auto begin_ms = static_cast<std::int64_t>(begin) * 1000 / rate;
    const auto end_ms = static_cast<std::int64_t>(end) * 1000 / rate;
    if (music) {
      if (open_start < 0) open_start = begin_ms;
      last_end = end_ms;
    } else if (open_start >= 0) {
      spans.push_back({TimeSpan::from_ms(open_start, last_end), MusicKind::music});
      open_start = -1;
    }
  }
  if (open_start >= 0 && last_end > open_start) {
    spans.push_back({TimeSpan::from_ms(open_start, last_end), MusicKind::music});
  }
  return spans;
}

long MockProviders::total_calls() const {
  return asr->calls() + completeness->calls() + punctuation->calls() + embedder->calls() +
         music->calls();
}

void MockProviders::reset_calls() {
  asr->reset_calls();
  completeness->reset_calls();
  punctuation->reset_calls();
  embedder->reset_calls();
  music->reset_calls();
}

MockProviders make_mock_providers(std::shared_ptr<const ScriptLibrary> scripts,
                                  SyntheticSpeakerConfig speaker_config,
                                  FlatnessConfig music_config) {
  return {std::make_shared<ScriptedAsr>(scripts), std::make_shared<RuleCompleteness>(),
          std::make_shared<PeriodPunctuator>(),
          std::make_shared<SyntheticSpeakerEmbedder>(scripts, speaker_config),
          std::make_shared<FlatnessMusicDetector>(music_config)};
}

}  // namespace ttscorpus::providers
