#include "ttscorpus/providers/provider.hpp"

#include <cmath>
#include <numeric>

namespace ttscorpus::providers {

CompletenessVerdict verdict_from_score(double score) {
  return {score >= kCompletenessCut, score};
}

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  norm_ = std::sqrt(std::inner_product(values_.begin(), values_.end(), values_.begin(), 0.0));
}

Embedding Embedding::normalized() const {
  if (!valid()) return *this;
  std::vector<double> v = values_;
  for (double& x : v) x /= norm_;
  return Embedding(std::move(v));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (!a.valid() || !b.valid() || a.dimension() != b.dimension()) return 0.0;
  const double dot =
      std::inner_product(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
  return dot / (a.norm() * b.norm());
}

std::string_view to_string(MusicKind k) {
  switch (k) {
    case MusicKind::music: return "music";
    case MusicKind::speech: return "speech";
    case MusicKind::noise: return "noise";
  }
  return "music";
}

MusicKind music_kind_from_string(std::string_view s) {
  if (s == "music") return MusicKind::music;
  if (s == "speech") return MusicKind::speech;
  if (s == "noise") return MusicKind::noise;
  throw std::invalid_argument("unknown span kind: " + std::string(s));
}

}  // namespace ttscorpus::providers
