#include "ttscorpus/corpus/manifest.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ttscorpus/text/unicode.hpp"

namespace ttscorpus {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

double ms_to_seconds(std::int64_t ms) { return static_cast<double>(ms) / 1000.0; }
std::int64_t seconds_to_ms(const json& v) { return std::llround(v.get<double>() * 1000.0); }

std::string segment_label(const Segment& s) {
  return s.source_id + " [" + std::to_string(s.span.start_ms()) + "-" +
         std::to_string(s.span.end_ms()) + " ms]";
}

}  // namespace

json stats_to_json(const CorpusStats& s) {
  return json{{"total_hours", s.total_hours},
              {"segment_count", s.segment_count},
              {"trimmed_hours", s.trimmed_hours},
              {"pct_trimmed_start", s.pct_trimmed_start},
              {"pct_trimmed_end", s.pct_trimmed_end},
              {"mean_segment_duration_s", s.mean_segment_duration_s},
              {"unique_words", s.unique_words},
              {"total_tokens", s.total_tokens},
              {"speaker_count", s.speaker_count}};
}

CorpusStats stats_from_json(const json& j) {
  CorpusStats s;
  s.total_hours = j.at("total_hours").get<double>();
  s.segment_count = j.at("segment_count").get<std::int64_t>();
  s.trimmed_hours = j.at("trimmed_hours").get<double>();
  s.pct_trimmed_start = j.at("pct_trimmed_start").get<double>();
  s.pct_trimmed_end = j.at("pct_trimmed_end").get<double>();
  s.mean_segment_duration_s = j.at("mean_segment_duration_s").get<double>();
  s.unique_words = j.at("unique_words").get<std::int64_t>();
  s.total_tokens = j.at("total_tokens").get<std::int64_t>();
  s.speaker_count = j.at("speaker_count").get<std::int64_t>();
  return s;
}

json segment_to_json(const Segment& s) {
  json j;
  j["record"] = "segment";
  j["source_id"] = s.source_id;
  j["audio_file"] = s.audio_file;
  j["start_s"] = ms_to_seconds(s.span.start_ms());
  j["end_s"] = ms_to_seconds(s.span.end_ms());
  j["transcript"] = s.transcript;
  j["completeness"] = to_string(s.completeness);
  j["trim"] = {{"start_s", ms_to_seconds(s.trim.start_ms)},
               {"end_s", ms_to_seconds(s.trim.end_ms)}};
  j["flags"] = s.flags;
  if (s.quality) {
    const auto& q = *s.quality;
    j["text"] = {{"character", q.text.character},
                 {"length", q.text.length},
                 {"repetition", q.text.repetition},
                 {"phonetic_coverage", q.text.phonetic_coverage},
                 {"total", q.text_total},
                 {"category", to_string(q.text_category)}};
    j["audio"] = {{"snr", q.audio.snr},
                  {"dynamic_range", q.audio.dynamic_range},
                  {"spectral", q.audio.spectral},
                  {"mfcc_variance", q.audio.mfcc_variance},
                  {"clipping", q.audio.clipping},
                  {"silence", q.audio.silence},
                  {"music", q.audio.music},
                  {"duration", q.audio.duration},
                  {"total", q.audio_total},
                  {"category", to_string(q.audio_category)}};
  } else {
    j["text"] = nullptr;
    j["audio"] = nullptr;
  }
  if (s.speaker) {
    j["speaker"] = {{"local_cluster", s.speaker->local_cluster},
                    {"confidence", s.speaker->confidence},
                    {"global_id", s.speaker->global_id ? json(*s.speaker->global_id)
                                                       : json(nullptr)}};
  } else {
    j["speaker"] = nullptr;
  }
  return j;
}

Segment segment_from_json(const json& j) {
  Segment s{.source_id = j.at("source_id").get<std::string>(),
            .span = TimeSpan::from_ms(seconds_to_ms(j.at("start_s")),
                                      seconds_to_ms(j.at("end_s")))};
  s.audio_file = j.at("audio_file").get<std::string>();
  s.transcript = j.at("transcript").get<std::string>();
  s.completeness = completeness_from_string(j.at("completeness").get<std::string>());
  s.trim.start_ms = seconds_to_ms(j.at("trim").at("start_s"));
  s.trim.end_ms = seconds_to_ms(j.at("trim").at("end_s"));
  s.flags = j.at("flags").get<std::vector<std::string>>();
  const json& text = j.at("text");
  const json& audio = j.at("audio");
  if (!text.is_null() && !audio.is_null()) {
    QualityReport q;
    q.text.character = text.at("character").get<double>();
    q.text.length = text.at("length").get<double>();
    q.text.repetition = text.at("repetition").get<double>();
    q.text.phonetic_coverage = text.at("phonetic_coverage").get<double>();
    q.text_total = text.at("total").get<double>();
    q.text_category = text_category_from_string(text.at("category").get<std::string>());
    q.audio.snr = audio.at("snr").get<double>();
    q.audio.dynamic_range = audio.at("dynamic_range").get<double>();
    q.audio.spectral = audio.at("spectral").get<double>();
    q.audio.mfcc_variance = audio.at("mfcc_variance").get<double>();
    q.audio.clipping = audio.at("clipping").get<double>();
    q.audio.silence = audio.at("silence").get<double>();
    q.audio.music = audio.at("music").get<double>();
    q.audio.duration = audio.at("duration").get<double>();
    q.audio_total = audio.at("total").get<double>();
    q.audio_category = audio_category_from_string(audio.at("category").get<std::string>());
    s.quality = q;
  }
  const json& speaker = j.at("speaker");
  if (!speaker.is_null()) {
    SpeakerAssignment a;
    a.local_cluster = speaker.at("local_cluster").get<int>();
    a.confidence = speaker.at("confidence").get<double>();
    if (!speaker.at("global_id").is_null()) a.global_id = speaker.at("global_id").get<int>();
    s.speaker = a;
  }
  return s;
}

void write_manifest(std::ostream& out, const CorpusManifest& manifest) {
  json header{{"record", "header"},
              {"format_version", kFormatVersion},
              {"kind", to_string(manifest.kind)},
              {"config_hash", manifest.pipeline_config_hash},
              {"segment_count", manifest.segments.size()},
              {"stats", stats_to_json(manifest.stats)}};
  out << header.dump() << '\n';
  for (const Segment& s : manifest.segments) {
    for (const std::string* field : {&s.source_id, &s.transcript, &s.audio_file}) {
      if (!text::is_valid_utf8(*field)) {
        throw ManifestError("unencodable text in segment " + segment_label(s));
      }
    }
    try {
      out << segment_to_json(s).dump() << '\n';
    } catch (const json::exception& e) {
      throw ManifestError("unencodable text in segment " + segment_label(s) + ": " +
                          e.what());
    }
  }
}

std::string serialize_manifest(const CorpusManifest& manifest) {
  std::ostringstream out;
  write_manifest(out, manifest);
  return out.str();
}

CorpusManifest parse_manifest(std::string_view text) {
  CorpusManifest m;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t declared = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        if (j.at("record") != "header") {
          throw ManifestError("manifest must start with a header record");
        }
        if (j.at("format_version").get<int>() != kFormatVersion) {
          throw ManifestError("unsupported manifest format version");
        }
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "full") {
          m.kind = ManifestKind::full;
        } else if (kind == "tts") {
          m.kind = ManifestKind::tts;
        } else {
          throw ManifestError("unknown manifest kind: " + kind);
        }
        m.pipeline_config_hash = j.at("config_hash").get<std::string>();
        m.stats = stats_from_json(j.at("stats"));
        declared = j.at("segment_count").get<std::size_t>();
        have_header = true;
      } else {
        if (j.at("record") != "segment") {
          throw ManifestError("expected a segment record");
        }
        m.segments.push_back(segment_from_json(j));
      }
    } catch (const ManifestError&) {
      throw;
    } catch (const std::exception& e) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ManifestError("manifest has no header record");
  if (declared != m.segments.size()) {
    throw ManifestError("header declares " + std::to_string(declared) +
                        " segments, found " + std::to_string(m.segments.size()));
  }
  return m;
}

CorpusManifest read_manifest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot open manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace ttscorpus
