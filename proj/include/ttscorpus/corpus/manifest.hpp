#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus {

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-delimited JSON. Line 1 is a header record carrying kind, stats and the
// config hash; every following line is one segment record. Object keys are
// emitted in sorted order, so equal manifests serialize to equal bytes.

std::string serialize_manifest(const CorpusManifest& manifest);
void write_manifest(std::ostream& out, const CorpusManifest& manifest);

CorpusManifest parse_manifest(std::string_view text);
CorpusManifest read_manifest_file(const std::string& path);

nlohmann::json segment_to_json(const Segment& segment);
Segment segment_from_json(const nlohmann::json& j);
nlohmann::json stats_to_json(const CorpusStats& stats);
CorpusStats stats_from_json(const nlohmann::json& j);

}  // namespace ttscorpus
