#include "ttscorpus/pipeline/config.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(ProviderMode m) { return m == ProviderMode::mock ? "mock" : "remote"; }

ProviderMode provider_mode_from_string(std::string_view s) {
  if (s == "mock") return ProviderMode::mock;
  if (s == "remote") return ProviderMode::remote;
  throw ConfigError("providers.mode must be \"mock\" or \"remote\", got \"" + std::string(s) + "\"");
}

namespace {

using Path = std::vector<std::string>;

std::string dotted(const Path& p) {
  std::string s;
  for (const auto& part : p) s += (s.empty() ? "" : ".") + part;
  return s;
}

// Value conversions beyond what nlohmann handles directly.
template <typename T>
json encode_value(const T& v) {
  return json(v);
}
json encode_value(const std::u32string& v) { return text::to_utf8(v); }
json encode_value(const fs::path& v) { return v.generic_string(); }
json encode_value(const quality::IntRange& r) { return json::array({r.lo, r.hi}); }
json encode_value(const quality::Ramp& r) { return json::array({r.at_zero, r.at_one}); }
json encode_value(const quality::Trapezoid& t) { return json::array({t.a, t.b, t.c, t.d}); }
json encode_value(const segmentation::ExtensionDirection& d) { return std::string(to_string(d)); }
json encode_value(const ProviderMode& m) { return std::string(to_string(m)); }

template <typename T>
void decode_value(const json& j, T& out) {
  out = j.get<T>();
}
void decode_value(const json& j, std::u32string& out) {
  out = text::to_code_points(text::nfc(j.get<std::string>()));
}
void decode_value(const json& j, fs::path& out) { out = j.get<std::string>(); }
void decode_value(const json& j, quality::IntRange& r) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 2) throw ConfigError("expected [lo, hi]");
  r = {v[0], v[1]};
}
void decode_value(const json& j, quality::Ramp& r) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError("expected [at_zero, at_one]");
  r = {v[0], v[1]};
}
void decode_value(const json& j, quality::Trapezoid& t) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw ConfigError("expected [a, b, c, d]");
  t = {v[0], v[1], v[2], v[3]};
}
void decode_value(const json& j, segmentation::ExtensionDirection& d) {
  try {
    d = segmentation::extension_direction_from_string(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}
void decode_value(const json& j, ProviderMode& m) { m = provider_mode_from_string(j.get<std::string>()); }

enum class Scope { results, connection, location };

/// Visits every setting with its JSON path. One list drives parsing,
/// serialization and hashing.
template <typename V>
void visit(V& v, PipelineConfig& c) {
  using S = Scope;
  v({"input_dir"}, c.input_dir, S::location);
  v({"output_dir"}, c.output_dir, S::location);
  v({"worker_count"}, c.worker_count, S::location);
  v({"random_seed"}, c.random_seed, S::results);

  auto& vad = c.vad;
  v({"vad", "aggressiveness"}, vad.aggressiveness, S::results);
  v({"vad", "frame_ms"}, vad.frame_ms, S::results);
  v({"vad", "min_silence_ms"}, vad.min_silence_ms, S::results);
  v({"vad", "min_segment_s"}, vad.min_segment_s, S::results);
  v({"vad", "max_segment_s"}, vad.max_segment_s, S::results);
  v({"vad", "padding_ms"}, vad.padding_ms, S::results);

  auto& seg = c.segmentation;
  v({"segmentation", "step_s"}, seg.step_s, S::results);
  v({"segmentation", "max_total_extension_s"}, seg.max_total_extension_s, S::results);
  v({"segmentation", "max_segment_s"}, seg.max_segment_s, S::results);
  v({"segmentation", "direction"}, seg.direction, S::results);

  auto& tr = c.trim;
  v({"trim", "initial_trim_s"}, tr.initial_trim_s, S::results);
  v({"trim", "fine_step_s"}, tr.fine_step_s, S::results);
  v({"trim", "stability_threshold"}, tr.stability_threshold, S::results);
  v({"trim", "max_binary_iterations"}, tr.max_binary_iterations, S::results);

  auto& tq = c.text_quality;
  v({"text_quality", "weights", "character"}, tq.weights.character, S::results);
  v({"text_quality", "weights", "length"}, tq.weights.length, S::results);
  v({"text_quality", "weights", "repetition"}, tq.weights.repetition, S::results);
  v({"text_quality", "weights", "phonetic_coverage"}, tq.weights.phonetic_coverage, S::results);
  v({"text_quality", "ideal_word_range"}, tq.ideal_words, S::results);
  v({"text_quality", "ideal_char_range"}, tq.ideal_chars, S::results);
  v({"text_quality", "inventory"}, tq.inventory, S::results);
  v({"text_quality", "vowel_letters"}, tq.vowel_letters, S::results);
  v({"text_quality", "coverage_for_full_marks"}, tq.coverage_for_full_marks, S::results);
  v({"text_quality", "foreign_penalty"}, tq.foreign_penalty, S::results);
  v({"text_quality", "dominance_allowance"}, tq.dominance_allowance, S::results);

  auto& aq = c.audio_quality;
  v({"audio_quality", "weights", "snr"}, aq.weights.snr, S::results);
  v({"audio_quality", "weights", "dynamic_range"}, aq.weights.dynamic_range, S::results);
  v({"audio_quality", "weights", "spectral"}, aq.weights.spectral, S::results);
  v({"audio_quality", "weights", "mfcc_variance"}, aq.weights.mfcc_variance, S::results);
  v({"audio_quality", "weights", "clipping"}, aq.weights.clipping, S::results);
  v({"audio_quality", "weights", "silence"}, aq.weights.silence, S::results);
  v({"audio_quality", "weights", "music"}, aq.weights.music, S::results);
  v({"audio_quality", "weights", "duration"}, aq.weights.duration, S::results);
  v({"audio_quality", "working_rate_hz"}, aq.working_rate_hz, S::results);
  v({"audio_quality", "frame_ms"}, aq.frame_ms, S::results);
  v({"audio_quality", "hop_ms"}, aq.hop_ms, S::results);
  v({"audio_quality", "silence_dbfs"}, aq.silence_dbfs, S::results);
  v({"audio_quality", "snr_full_marks_db"}, aq.snr_full_marks_db, S::results);
  v({"audio_quality", "snr_max_db"}, aq.snr_max_db, S::results);
  v({"audio_quality", "dynamic_range_full_marks_db"}, aq.dynamic_range_full_marks_db, S::results);
  v({"audio_quality", "centroid_hz"}, aq.centroid_hz, S::results);
  v({"audio_quality", "rolloff_hz"}, aq.rolloff_hz, S::results);
  v({"audio_quality", "rolloff_fraction"}, aq.rolloff_fraction, S::results);
  v({"audio_quality", "mfcc_count"}, aq.mfcc_count, S::results);
  v({"audio_quality", "mel_filters"}, aq.mel_filters, S::results);
  v({"audio_quality", "mel_floor_ratio"}, aq.mel_floor_ratio, S::results);
  v({"audio_quality", "mfcc_variance"}, aq.mfcc_variance, S::results);
  v({"audio_quality", "clip_level"}, aq.clip_level, S::results);
  v({"audio_quality", "clipping_tolerance"}, aq.clipping_tolerance, S::results);
  v({"audio_quality", "clipping_zero_ratio"}, aq.clipping_zero_ratio, S::results);
  v({"audio_quality", "silence_ideal_max_ratio"}, aq.silence_ideal_max_ratio, S::results);
  v({"audio_quality", "silence_zero_ratio"}, aq.silence_zero_ratio, S::results);
  v({"audio_quality", "ideal_duration_range_s", "min"}, aq.ideal_duration_min_s, S::results);
  v({"audio_quality", "ideal_duration_range_s", "max"}, aq.ideal_duration_max_s, S::results);
  v({"audio_quality", "duration_zero_s"}, aq.duration_zero_s, S::results);

  auto& sp = c.speaker;
  v({"speaker", "outlier_sigma"}, sp.preprocess.outlier_sigma, S::results);
  v({"speaker", "reduction", "enabled"}, sp.preprocess.reduction.enabled, S::results);
  v({"speaker", "reduction", "target_dimension"}, sp.preprocess.reduction.target_dimension, S::results);
  v({"speaker", "reduction", "neighbors"}, sp.preprocess.reduction.neighbors, S::results);
  v({"speaker", "reduction", "epochs"}, sp.preprocess.reduction.epochs, S::results);
  v({"speaker", "reduction", "min_dist"}, sp.preprocess.reduction.min_dist, S::results);
  v({"speaker", "k_max_cap"}, sp.k_max_cap, S::results);
  v({"speaker", "points_per_cluster"}, sp.points_per_cluster, S::results);
  v({"speaker", "hdbscan_min_cluster_size"}, sp.hdbscan_min_cluster_size, S::results);
  v({"speaker", "confidence_floor"}, sp.confidence_floor, S::results);
  v({"speaker", "merge_threshold"}, sp.merge_threshold, S::results);

  v({"tts_filter", "audio_min"}, c.tts_filter.audio_min, S::results);
  v({"tts_filter", "text_min"}, c.tts_filter.text_min, S::results);

  auto& pr = c.providers;
  v({"providers", "mode"}, pr.mode, S::results);
  v({"providers", "remote", "base_url"}, pr.remote.base_url, S::connection);
  v({"providers", "remote", "max_in_flight"}, pr.remote.max_in_flight, S::connection);
  v({"providers", "remote", "attempts"}, pr.remote.attempts, S::connection);
  v({"providers", "remote", "initial_backoff_ms"}, pr.remote.initial_backoff_ms, S::connection);
  v({"providers", "remote", "max_retry_after_ms"}, pr.remote.max_retry_after_ms, S::connection);
  v({"providers", "remote", "timeout_ms"}, pr.remote.timeout_ms, S::connection);
  v({"providers", "mock", "embedding_dimension"}, pr.mock.speaker.dimension, S::results);
  v({"providers", "mock", "embedding_spread"}, pr.mock.speaker.spread, S::results);
  v({"providers", "mock", "final_words"}, pr.mock.final_words, S::results);
  v({"providers", "mock", "music", "window_s"}, pr.mock.music.window_s, S::results);
  v({"providers", "mock", "music", "flatness_threshold"}, pr.mock.music.flatness_threshold, S::results);
  v({"providers", "mock", "music", "silence_dbfs"}, pr.mock.music.silence_dbfs, S::results);
  v({"providers", "mock", "music", "fft_size"}, pr.mock.music.fft_size, S::results);

  v({"output", "sample_rate_hz"}, c.output.sample_rate_hz, S::results);
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  template <typename T>
  void operator()(std::initializer_list<const char*> path, T& out, Scope) {
    Path p(path.begin(), path.end());
    known_.insert(dotted(p));
    for (std::size_t i = 1; i < p.size(); ++i) sections_.insert(dotted(Path(p.begin(), p.begin() + i)));
    const json* node = &root_;
    for (const auto& part : p) {
      if (!node->is_object() || !node->contains(part)) return;
      node = &(*node)[part];
    }
    try {
      decode_value(*node, out);
    } catch (const ConfigError& e) {
      throw ConfigError(dotted(p) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(dotted(p) + ": " + e.what());
    }
  }

  void check_unknown() const { check(root_, {}); }

 private:
  void check(const json& node, const Path& at) const {
    for (const auto& [key, value] : node.items()) {
      Path p = at;
      p.push_back(key);
      const std::string name = dotted(p);
      if (known_.contains(name)) continue;
      if (sections_.contains(name) && value.is_object()) {
        check(value, p);
        continue;
      }
      throw ConfigError("unknown config key: " + name);
    }
  }

  const json& root_;
  std::set<std::string> known_;
  std::set<std::string> sections_;
};

class Writer {
 public:
  explicit Writer(bool for_hash) : for_hash_(for_hash) {}

  template <typename T>
  void operator()(std::initializer_list<const char*> path, T& value, Scope scope) {
    if (for_hash_ && scope != Scope::results) return;
    json* node = &out;
    for (const char* part : path) node = &(*node)[part];
    *node = encode_value(value);
  }

  json out = json::object();

 private:
  bool for_hash_;
};

}  // namespace

void PipelineConfig::validate() const {
  auto wrap = [](const char* section, auto&& f) {
    try {
      f();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string(section) + ": " + e.what());
    }
  };
  if (input_dir.empty()) throw ConfigError("input_dir is required");
  if (output_dir.empty()) throw ConfigError("output_dir is required");
  if (worker_count < 1) throw ConfigError("worker_count must be >= 1");
  wrap("vad", [&] { vad.validate(); });
  wrap("segmentation", [&] { segmentation.validate(); });
  wrap("trim", [&] { trim.validate(); });
  wrap("text_quality", [&] { text_quality.validate(); });
  wrap("audio_quality", [&] { audio_quality.validate(); });
  wrap("speaker", [&] { speaker.validate(); });
  for (double t : {tts_filter.audio_min, tts_filter.text_min}) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("tts_filter thresholds must be in [0, 1]");
  }
  if (output.sample_rate_hz < 8000 || output.sample_rate_hz > 192000) {
    throw ConfigError("output.sample_rate_hz must be in [8000, 192000]");
  }
  if (providers.mock.speaker.dimension < 2) {
    throw ConfigError("providers.mock.embedding_dimension must be >= 2");
  }
  if (providers.remote.attempts < 1 || providers.remote.max_in_flight < 1) {
    throw ConfigError("providers.remote attempts and max_in_flight must be >= 1");
  }
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  Reader reader(j);
  visit(reader, c);
  reader.check_unknown();
  for (fs::path* p : {&c.input_dir, &c.output_dir}) {
    if (!p->empty() && p->is_relative() && !base_dir.empty()) *p = base_dir / *p;
  }
  c.speaker.preprocess.reduction.seed = c.random_seed;
  c.providers.mock.speaker.seed = c.random_seed;
  return c;
}

json config_to_json(const PipelineConfig& config) {
  Writer w(false);
  visit(w, const_cast<PipelineConfig&>(config));
  return w.out;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  PipelineConfig c = config_from_json(j, path.parent_path());
  if (const char* url = std::getenv(kProviderUrlEnv); url != nullptr && *url != '\0') {
    c.providers.remote.base_url = url;
  }
  c.validate();
  return c;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string config_hash(const PipelineConfig& config) {
  Writer w(true);
  visit(w, const_cast<PipelineConfig&>(config));
  return sha256_hex(w.out.dump());
}

}  // namespace ttscorpus::pipeline
