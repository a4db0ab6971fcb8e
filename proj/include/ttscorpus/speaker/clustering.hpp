#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ttscorpus::speaker {

/// Row-major point set: one vector per point, all of equal dimension.
using Points = std::vector<std::vector<double>>;
using Labels = std::vector<int>;

enum class Metric { euclidean, cosine };
enum class Linkage { ward, average };

double distance(const std::vector<double>& a, const std::vector<double>& b, Metric metric);

/// One agglomeration step: clusters represented by points `a` and `b`
/// joined at `height`.
struct Merge {
  std::size_t a;
  std::size_t b;
  double height;
};

/// Full hierarchy over `points` by the nearest-neighbour chain algorithm.
/// Ward requires Metric::euclidean. Returns n - 1 merges sorted by height.
std::vector<Merge> hierarchical(const Points& points, Linkage linkage, Metric metric);

/// Labels after applying the first n - k merges. Ids are dense and ordered
/// by the lowest point index in each cluster.
Labels cut_to_k(const std::vector<Merge>& merges, std::size_t n, std::size_t k);

/// Labels after applying every merge with height <= threshold.
Labels cut_at_height(const std::vector<Merge>& merges, std::size_t n, double threshold);

std::size_t cluster_count(const Labels& labels);

/// Relabels so ids are dense and ordered by first appearance.
Labels canonical_labels(const Labels& labels);

/// Per-point silhouette; singleton clusters score 0. Needs >= 2 clusters.
std::vector<double> silhouette_samples(const Points& points, const Labels& labels, Metric metric);
double silhouette_score(const Points& points, const Labels& labels, Metric metric);
double calinski_harabasz(const Points& points, const Labels& labels);
double davies_bouldin(const Points& points, const Labels& labels);

std::vector<std::vector<double>> centroids(const Points& points, const Labels& labels);

/// Lloyd's algorithm from a farthest-first seeding that starts at the point
/// farthest from the mean. Deterministic; ties go to the lower index.
Labels kmeans(const Points& points, std::size_t k, int max_iterations = 100);

/// Normalized spectral clustering over the cosine affinity max(0, cos).
Labels spectral_clustering(const Points& points, std::size_t k);

/// Number of clusters HDBSCAN selects (excess of mass, the root cluster is
/// never selected). May be 0 when everything is noise.
std::size_t hdbscan_cluster_count(const Points& points, std::size_t min_cluster_size);

/// Minimum-cost perfect assignment on a square cost matrix; result[row] = col.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost);

}  // namespace ttscorpus::speaker
