#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttscorpus/providers/provider.hpp"
#include "ttscorpus/speaker/clustering.hpp"
#include "ttscorpus/speaker/preprocess.hpp"

namespace ttscorpus::speaker {

struct SpeakerConfig {
  PreprocessConfig preprocess;
  int k_max_cap = 10;
  int points_per_cluster = 5;  ///< k_max = min(k_max_cap, n / points_per_cluster)
  int hdbscan_min_cluster_size = 5;
  double confidence_floor = 0.35;
  double merge_threshold = 0.25;

  void validate() const;
};

struct KVotes {
  int silhouette = 0;
  int calinski_harabasz = 0;
  int davies_bouldin = 0;
  int hdbscan = 0;
  int k_star = 0;
  bool majority = false;
};

/// Consensus k over [k_min, k_max]: each index votes for its best k on a
/// Ward dendrogram, HDBSCAN votes its cluster count clamped to the range.
/// A value with at least three of four votes wins; otherwise the lower
/// median of the votes. The range shrinks to n - 1 when too few points.
KVotes estimate_k(const Points& points, int k_min, int k_max, int hdbscan_min_cluster_size = 5);

/// Range rule: [2, min(cap, n / points_per_cluster)], or k = 1 when empty.
int k_max_for(std::size_t n, const SpeakerConfig& config);

enum class ClusterMethod { agglomerative, spectral };
std::string_view to_string(ClusterMethod m);

struct LocalClusterResult {
  Labels labels;
  std::vector<double> confidences;
  std::vector<bool> assigned;  ///< confidence >= floor
  int k_star = 1;
  ClusterMethod method = ClusterMethod::agglomerative;
  double silhouette = 0.0;
};

/// Average-linkage cosine agglomerative vs. spectral; the higher cosine
/// silhouette wins, ties to agglomerative. Confidence of a point is
/// 0.5 * (s_i + 1) / 2 + 0.5 * (1 - d_i / max d) with d the cosine distance
/// to its cluster centroid and max over the same cluster.
LocalClusterResult cluster_local(const Points& points, int k_star, double confidence_floor = 0.35);

/// Local clusters of one recording as input to the global merge.
struct LocalCluster {
  std::string recording_id;
  int local_id = 0;
  std::vector<providers::Embedding> members;
  std::vector<double> weights;
};

struct GlobalMember {
  std::string recording_id;
  int local_id = 0;
  double weight = 0.0;
};

struct GlobalSpeaker {
  int global_id = 0;
  providers::Embedding centroid;
  std::vector<GlobalMember> members;
};

/// Confidence-weighted unit centroid of the members.
providers::Embedding weighted_centroid(const std::vector<providers::Embedding>& members,
                                       const std::vector<double>& weights);

/// Average linkage on 1 - cosine over local centroids, cut at the threshold.
/// Groups with mean pairwise similarity below 1 - threshold split back into
/// singletons. Ids follow the order of each group's first (recording, local)
/// member.
std::vector<GlobalSpeaker> merge_global(const std::vector<LocalCluster>& locals,
                                        double merge_threshold = 0.25);

struct LabeledRecording {
  std::string recording_id;
  std::vector<std::string> narrators;  ///< metadata; only single-narrator recordings count
  std::vector<std::optional<int>> global_ids;  ///< per segment
};

struct ConsistencyReport {
  double percentage = 0.0;
  std::size_t matched = 0;
  std::size_t labeled = 0;
  std::map<std::string, int> narrator_to_global;
};

/// Majority global id per single-narrator recording, then the optimal
/// one-to-one matching of narrator labels to ids. nullopt when no
/// recording qualifies.
std::optional<ConsistencyReport> consistency_report(const std::vector<LabeledRecording>& recordings);

}  // namespace ttscorpus::speaker
