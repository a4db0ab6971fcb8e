#include "ttscorpus/speaker/diarization.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ttscorpus::speaker {

void SpeakerConfig::validate() const {
  if (k_max_cap < 2) throw std::invalid_argument("k_max_cap must be >= 2");
  if (points_per_cluster < 1) throw std::invalid_argument("points_per_cluster must be >= 1");
  if (hdbscan_min_cluster_size < 2) throw std::invalid_argument("hdbscan_min_cluster_size must be >= 2");
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) {
    throw std::invalid_argument("confidence_floor must be in [0, 1]");
  }
  if (!(merge_threshold >= 0.0 && merge_threshold < 1.0)) {
    throw std::invalid_argument("merge_threshold must be in [0, 1)");
  }
}

int k_max_for(std::size_t n, const SpeakerConfig& config) {
  const int k = std::min<int>(config.k_max_cap, static_cast<int>(n) / config.points_per_cluster);
  return k < 2 ? 1 : k;
}

KVotes estimate_k(const Points& points, int k_min, int k_max, int hdbscan_min_cluster_size) {
  const int n = static_cast<int>(points.size());
  if (k_min < 2) throw std::invalid_argument("k_min must be >= 2");
  if (k_max > n - 1) {
    spdlog::warn("estimate_k: {} points cannot support k_max {}; shrinking to {}", n, k_max, n - 1);
    k_max = n - 1;
  }
  if (k_max < k_min) throw std::invalid_argument("estimate_k: empty k range");

  const auto merges = hierarchical(points, Linkage::ward, Metric::euclidean);
  KVotes v;
  double best_sil = -INFINITY, best_ch = -INFINITY, best_db = INFINITY;
  for (int k = k_min; k <= k_max; ++k) {
    const Labels labels = cut_to_k(merges, points.size(), static_cast<std::size_t>(k));
    const double sil = silhouette_score(points, labels, Metric::euclidean);
    const double ch = calinski_harabasz(points, labels);
    const double db = davies_bouldin(points, labels);
    if (sil > best_sil) best_sil = sil, v.silhouette = k;
    if (ch > best_ch) best_ch = ch, v.calinski_harabasz = k;
    if (db < best_db) best_db = db, v.davies_bouldin = k;
  }
  const auto found =
      static_cast<int>(hdbscan_cluster_count(points, static_cast<std::size_t>(hdbscan_min_cluster_size)));
  v.hdbscan = std::clamp(found, k_min, k_max);

  std::vector<int> votes{v.silhouette, v.calinski_harabasz, v.davies_bouldin, v.hdbscan};
  std::sort(votes.begin(), votes.end());
  for (int c : votes) {
    if (std::count(votes.begin(), votes.end(), c) >= 3) {
      v.k_star = c;
      v.majority = true;
      return v;
    }
  }
  v.k_star = votes[1];
  return v;
}

std::string_view to_string(ClusterMethod m) {
  return m == ClusterMethod::agglomerative ? "agglomerative" : "spectral";
}

LocalClusterResult cluster_local(const Points& points, int k_star, double confidence_floor) {
  if (points.empty()) throw std::invalid_argument("cluster_local needs points");
  const std::size_t n = points.size();
  if (k_star < 1 || static_cast<std::size_t>(k_star) > n) {
    throw std::invalid_argument("k_star out of range");
  }
  LocalClusterResult r;
  const bool identical = std::all_of(points.begin(), points.end(),
                                     [&](const auto& p) { return p == points.front(); });
  if (k_star == 1 || identical) {
    r.labels.assign(n, 0);
    r.confidences.assign(n, 1.0);
    r.assigned.assign(n, true);
    return r;
  }

  const Labels agg = cut_to_k(hierarchical(points, Linkage::average, Metric::cosine), n,
                              static_cast<std::size_t>(k_star));
  const Labels spec = spectral_clustering(points, static_cast<std::size_t>(k_star));
  auto score = [&](const Labels& l) {
    return cluster_count(l) < 2 ? -1.0 : silhouette_score(points, l, Metric::cosine);
  };
  const double s_agg = score(agg);
  const double s_spec = score(spec);
  if (s_spec > s_agg) {
    r.labels = spec;
    r.method = ClusterMethod::spectral;
    r.silhouette = s_spec;
  } else {
    r.labels = agg;
    r.silhouette = s_agg;
  }
  r.k_star = static_cast<int>(cluster_count(r.labels));

  const auto sil = r.k_star >= 2 ? silhouette_samples(points, r.labels, Metric::cosine)
                                 : std::vector<double>(n, 1.0);
  const auto c = centroids(points, r.labels);
  std::vector<double> d(n);
  std::vector<double> d_max(static_cast<std::size_t>(r.k_star), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = distance(points[i], c[r.labels[i]], Metric::cosine);
    d_max[r.labels[i]] = std::max(d_max[r.labels[i]], d[i]);
  }
  r.confidences.resize(n);
  r.assigned.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = d_max[r.labels[i]];
    const double proximity = m > 0.0 ? 1.0 - d[i] / m : 1.0;
    r.confidences[i] = std::clamp(0.5 * ((sil[i] + 1.0) / 2.0) + 0.5 * proximity, 0.0, 1.0);
    r.assigned[i] = r.confidences[i] >= confidence_floor;
  }
  return r;
}

providers::Embedding weighted_centroid(const std::vector<providers::Embedding>& members,
                                       const std::vector<double>& weights) {
  if (members.empty()) throw std::invalid_argument("centroid of no members");
  if (weights.size() != members.size()) throw std::invalid_argument("weights size mismatch");
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const bool uniform = !(total > 0.0);
  std::vector<double> acc(members.front().dimension(), 0.0);
  for (std::size_t m = 0; m < members.size(); ++m) {
    const double w = uniform ? 1.0 : weights[m];
    const auto unit = members[m].normalized();
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * unit.values()[j];
  }
  providers::Embedding e(std::move(acc));
  return e.valid() ? e.normalized() : members.front().normalized();
}

std::vector<GlobalSpeaker> merge_global(const std::vector<LocalCluster>& locals,
                                        double merge_threshold) {
  if (locals.empty()) throw std::invalid_argument("merge_global needs at least one local cluster");
  std::vector<std::size_t> order(locals.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(locals[x].recording_id, locals[x].local_id) <
           std::tie(locals[y].recording_id, locals[y].local_id);
  });

  std::vector<providers::Embedding> cents;
  Points points;
  for (std::size_t idx : order) {
    cents.push_back(weighted_centroid(locals[idx].members, locals[idx].weights));
    points.push_back(cents.back().values());
  }
  const std::size_t n = points.size();
  Labels groups(n, 0);
  if (n > 1) {
    groups = cut_at_height(hierarchical(points, Linkage::average, Metric::cosine), n,
                           merge_threshold);
  }

  // Dissolve groups that are internally too loose.
  std::vector<std::vector<std::size_t>> members(cluster_count(groups));
  for (std::size_t i = 0; i < n; ++i) members[groups[i]].push_back(i);
  std::vector<std::vector<std::size_t>> final_groups;
  for (auto& g : members) {
    if (g.size() > 1) {
      double sim = 0.0;
      std::size_t pairs = 0;
      for (std::size_t x = 0; x < g.size(); ++x) {
        for (std::size_t y = x + 1; y < g.size(); ++y, ++pairs) {
          sim += providers::cosine_similarity(cents[g[x]], cents[g[y]]);
        }
      }
      if (sim / pairs < 1.0 - merge_threshold) {
        for (std::size_t i : g) final_groups.push_back({i});
        continue;
      }
    }
    final_groups.push_back(g);
  }
  std::sort(final_groups.begin(), final_groups.end());

  std::vector<GlobalSpeaker> out;
  for (const auto& g : final_groups) {
    GlobalSpeaker s;
    s.global_id = static_cast<int>(out.size());
    std::vector<providers::Embedding> cs;
    std::vector<double> ws;
    for (std::size_t i : g) {
      const LocalCluster& lc = locals[order[i]];
      const double w = std::accumulate(lc.weights.begin(), lc.weights.end(), 0.0);
      s.members.push_back({lc.recording_id, lc.local_id, w});
      cs.push_back(cents[i]);
      ws.push_back(w);
    }
    s.centroid = weighted_centroid(cs, ws);
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<ConsistencyReport> consistency_report(const std::vector<LabeledRecording>& recordings) {
  struct Row {
    std::string narrator;
    std::optional<int> majority;
  };
  std::vector<Row> rows;
  for (const auto& r : recordings) {
    if (r.narrators.size() != 1) continue;
    std::map<int, int> counts;
    for (const auto& g : r.global_ids) {
      if (g) ++counts[*g];
    }
    std::optional<int> majority;
    int best = 0;
    for (const auto& [id, c] : counts) {
      if (c > best) best = c, majority = id;
    }
    rows.push_back({r.narrators.front(), majority});
  }
  if (rows.empty()) return std::nullopt;

  std::vector<std::string> names;
  std::vector<int> ids;
  for (const auto& r : rows) {
    names.push_back(r.narrator);
    if (r.majority) ids.push_back(*r.majority);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  const std::size_t size = std::max(names.size(), ids.size());
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (const auto& r : rows) {
    if (!r.majority) continue;
    const auto ni = std::lower_bound(names.begin(), names.end(), r.narrator) - names.begin();
    const auto gi = std::lower_bound(ids.begin(), ids.end(), *r.majority) - ids.begin();
    cost[ni][gi] -= 1.0;  // maximize agreement
  }
  const auto match = hungarian(cost);

  ConsistencyReport rep;
  rep.labeled = rows.size();
  for (std::size_t ni = 0; ni < names.size(); ++ni) {
    if (match[ni] < ids.size()) rep.narrator_to_global[names[ni]] = ids[match[ni]];
  }
  for (const auto& r : rows) {
    auto it = rep.narrator_to_global.find(r.narrator);
    if (r.majority && it != rep.narrator_to_global.end() && it->second == *r.majority) ++rep.matched;
  }
  rep.percentage = 100.0 * static_cast<double>(rep.matched) / static_cast<double>(rep.labeled);
  return rep;
}

}  // namespace ttscorpus::speaker
