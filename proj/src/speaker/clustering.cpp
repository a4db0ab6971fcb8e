#include "ttscorpus/speaker/clustering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ttscorpus::speaker {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

DistanceMatrix pairwise(const Points& points, Metric metric) {
  DistanceMatrix d(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      d(i, j) = d(j, i) = distance(points[i], points[j], metric);
    }
  }
  return d;
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

Labels labels_from(UnionFind& uf, std::size_t n) {
  Labels raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<int>(uf.find(i));
  return canonical_labels(raw);
}

void check_points(const Points& points) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw std::invalid_argument("ragged point set");
  }
}

}  // namespace

double distance(const std::vector<double>& a, const std::vector<double>& b, Metric metric) {
  if (metric == Metric::euclidean) return std::sqrt(squared_euclidean(a, b));
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::clamp(1.0 - dot(a, b) / (na * nb), 0.0, 2.0);
}

std::vector<Merge> hierarchical(const Points& points, Linkage linkage, Metric metric) {
  check_points(points);
  if (linkage == Linkage::ward && metric != Metric::euclidean) {
    throw std::invalid_argument("ward linkage needs the euclidean metric");
  }
  const std::size_t n = points.size();
  DistanceMatrix d = pairwise(points, metric);
  if (linkage == Linkage::ward) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d(i, j) *= d(i, j);
    }
  }
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  std::vector<std::size_t> chain;

  while (merges.size() + 1 < n) {
    if (chain.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) {
          chain.push_back(i);
          break;
        }
      }
    }
    std::size_t a = 0;
    std::size_t b = 0;
    while (true) {
      a = chain.back();
      const bool has_prev = chain.size() >= 2;
      const std::size_t prev = has_prev ? chain[chain.size() - 2] : 0;
      double best = has_prev ? d(a, prev) : kInf;
      b = has_prev ? prev : n;
      for (std::size_t c = 0; c < n; ++c) {
        if (!active[c] || c == a) continue;
        if (d(a, c) < best) {
          best = d(a, c);
          b = c;
        }
      }
      if (has_prev && b == prev) break;
      chain.push_back(b);
    }
    chain.pop_back();
    chain.pop_back();

    const double height = linkage == Linkage::ward ? std::sqrt(std::max(0.0, d(a, b))) : d(a, b);
    const std::size_t keep = std::min(a, b);
    const std::size_t drop = std::max(a, b);
    merges.push_back({keep, drop, height});
    const double na = size[a];
    const double nb = size[b];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      double v;
      if (linkage == Linkage::average) {
        v = (na * d(a, k) + nb * d(b, k)) / (na + nb);
      } else {
        const double nk = size[k];
        v = ((na + nk) * d(a, k) + (nb + nk) * d(b, k) - nk * d(a, b)) / (na + nb + nk);
      }
      d(keep, k) = d(k, keep) = v;
    }
    active[drop] = false;
    size[keep] = na + nb;
  }
  std::stable_sort(merges.begin(), merges.end(),
                   [](const Merge& x, const Merge& y) { return x.height < y.height; });
  return merges;
}

Labels cut_to_k(const std::vector<Merge>& merges, std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("cluster count out of range");
  UnionFind uf(n);
  for (std::size_t i = 0; i < n - k && i < merges.size(); ++i) uf.unite(merges[i].a, merges[i].b);
  return labels_from(uf, n);
}

Labels cut_at_height(const std::vector<Merge>& merges, std::size_t n, double threshold) {
  UnionFind uf(n);
  for (const auto& m : merges) {
    if (m.height > threshold) break;
    uf.unite(m.a, m.b);
  }
  return labels_from(uf, n);
}

std::size_t cluster_count(const Labels& labels) {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return static_cast<std::size_t>(top + 1);
}

Labels canonical_labels(const Labels& labels) {
  std::map<int, int> ids;
  Labels out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

std::vector<double> silhouette_samples(const Points& points, const Labels& labels, Metric metric) {
  check_points(points);
  const std::size_t n = points.size();
  const std::size_t k = cluster_count(labels);
  if (k < 2) throw std::invalid_argument("silhouette needs at least two clusters");
  const DistanceMatrix d = pairwise(points, metric);
  std::vector<double> counts(k, 0.0);
  for (int l : labels) counts[l] += 1.0;
  std::vector<double> s(n, 0.0);
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) sums[labels[j]] += d(i, j);
    const int own = labels[i];
    if (counts[own] <= 1.0) continue;
    const double a = sums[own] / (counts[own] - 1.0);
    double b = kInf;
    for (std::size_t c = 0; c < k; ++c) {
      if (static_cast<int>(c) != own && counts[c] > 0) b = std::min(b, sums[c] / counts[c]);
    }
    const double m = std::max(a, b);
    s[i] = m > 0.0 ? (b - a) / m : 0.0;
  }
  return s;
}

double silhouette_score(const Points& points, const Labels& labels, Metric metric) {
  const auto s = silhouette_samples(points, labels, metric);
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<std::vector<double>> centroids(const Points& points, const Labels& labels) {
  check_points(points);
  const std::size_t k = cluster_count(labels);
  std::vector<std::vector<double>> c(k, std::vector<double>(points.front().size(), 0.0));
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    counts[labels[i]] += 1.0;
    for (std::size_t j = 0; j < points[i].size(); ++j) c[labels[i]][j] += points[i][j];
  }
  for (std::size_t l = 0; l < k; ++l) {
    for (double& v : c[l]) v /= std::max(1.0, counts[l]);
  }
  return c;
}

double calinski_harabasz(const Points& points, const Labels& labels) {
  const std::size_t n = points.size();
  const std::size_t k = cluster_count(labels);
  if (k < 2 || k >= n) throw std::invalid_argument("Calinski-Harabasz needs 2 <= k < n");
  const auto c = centroids(points, labels);
  std::vector<double> mean(points.front().size(), 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.size(); ++j) mean[j] += p[j] / static_cast<double>(n);
  }
  std::vector<double> counts(k, 0.0);
  for (int l : labels) counts[l] += 1.0;
  double between = 0.0;
  for (std::size_t l = 0; l < k; ++l) between += counts[l] * squared_euclidean(c[l], mean);
  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i) within += squared_euclidean(points[i], c[labels[i]]);
  if (within == 0.0) return 1.0;
  return between * static_cast<double>(n - k) / (within * static_cast<double>(k - 1));
}

double davies_bouldin(const Points& points, const Labels& labels) {
  const std::size_t k = cluster_count(labels);
  if (k < 2) throw std::invalid_argument("Davies-Bouldin needs at least two clusters");
  const auto c = centroids(points, labels);
  std::vector<double> scatter(k, 0.0);
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    scatter[labels[i]] += std::sqrt(squared_euclidean(points[i], c[labels[i]]));
    counts[labels[i]] += 1.0;
  }
  for (std::size_t l = 0; l < k; ++l) scatter[l] /= std::max(1.0, counts[l]);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double sep = std::sqrt(squared_euclidean(c[i], c[j]));
      const double spread = scatter[i] + scatter[j];
      worst = std::max(worst, sep > 0.0 ? spread / sep : (spread > 0.0 ? kInf : 0.0));
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

Labels kmeans(const Points& points, std::size_t k, int max_iterations) {
  check_points(points);
  const std::size_t n = points.size();
  if (k < 1 || k > n) throw std::invalid_argument("k-means cluster count out of range");
  const std::size_t dim = points.front().size();

  std::vector<double> mean(dim, 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < dim; ++j) mean[j] += p[j] / static_cast<double>(n);
  }
  auto farthest = [&](const std::vector<double>& score) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (score[i] > score[best]) best = i;
    }
    return best;
  };
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_euclidean(points[i], mean);
  std::vector<std::vector<double>> centers{points[farthest(nearest)]};
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_euclidean(points[i], centers[0]);
  while (centers.size() < k) {
    centers.push_back(points[farthest(nearest)]);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_euclidean(points[i], centers.back()));
    }
  }

  Labels labels(n, -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_euclidean(points[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = squared_euclidean(points[i], centers[c]);
        if (dc < best_d) {
          best_d = dc;
          best = static_cast<int>(c);
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<double> counts(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[labels[i]] += 1.0;
      for (std::size_t j = 0; j < dim; ++j) sums[labels[i]][j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0.0) continue;  // empty cluster keeps its center
      for (std::size_t j = 0; j < dim; ++j) centers[c][j] = sums[c][j] / counts[c];
    }
  }
  return canonical_labels(labels);
}

Labels spectral_clustering(const Points& points, std::size_t k) {
  check_points(points);
  const std::size_t n = points.size();
  if (k < 1 || k > n) throw std::invalid_argument("spectral cluster count out of range");
  if (k == 1) return Labels(n, 0);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::max(0.0, 1.0 - distance(points[i], points[j], Metric::cosine));
      a(i, j) = a(j, i) = v;
    }
  }
  Eigen::VectorXd inv_sqrt_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double deg = a.row(static_cast<Eigen::Index>(i)).sum();
    inv_sqrt_degree(i) = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  const Eigen::MatrixXd l = inv_sqrt_degree.asDiagonal() * a * inv_sqrt_degree.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  // Eigenvalues ascend; the top k eigenvectors are the last k columns.
  const Eigen::MatrixXd u = solver.eigenvectors().rightCols(static_cast<Eigen::Index>(k));

  Points rows(n, std::vector<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = u.row(static_cast<Eigen::Index>(i)).norm();
    for (std::size_t j = 0; j < k; ++j) {
      rows[i][j] = norm > 0.0 ? u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / norm : 0.0;
    }
  }
  return kmeans(rows, k);
}

std::size_t hdbscan_cluster_count(const Points& points, std::size_t min_cluster_size) {
  check_points(points);
  if (min_cluster_size < 2) throw std::invalid_argument("min_cluster_size must be >= 2");
  const std::size_t n = points.size();
  if (n < 2 * min_cluster_size) return 0;

  const DistanceMatrix d = pairwise(points, Metric::euclidean);
  std::vector<double> core(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = d(i, j);
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(min_cluster_size - 1),
                     row.end());
    core[i] = row[min_cluster_size - 1];
  }
  auto reach = [&](std::size_t i, std::size_t j) { return std::max({core[i], core[j], d(i, j)}); };

  // Prim's minimum spanning tree over mutual reachability.
  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> mst;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> from(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double w = reach(current, j);
      if (w < best[j]) {
        best[j] = w;
        from[j] = current;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    in_tree[next] = true;
    mst.push_back({from[next], next, best[next]});
    current = next;
  }
  std::stable_sort(mst.begin(), mst.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });

  // Single-linkage tree: leaves 0..n-1, internal nodes n..2n-2.
  struct Node {
    std::size_t left = 0, right = 0;
    double lambda = 0.0;
    std::size_t size = 1;
  };
  std::vector<Node> tree(2 * n - 1);
  std::vector<std::size_t> top(n);
  std::iota(top.begin(), top.end(), 0);
  UnionFind uf(n);
  for (std::size_t e = 0; e < mst.size(); ++e) {
    const std::size_t ra = uf.find(mst[e].a);
    const std::size_t rb = uf.find(mst[e].b);
    const std::size_t id = n + e;
    tree[id] = {top[ra], top[rb], 1.0 / std::max(mst[e].w, 1e-12),
                tree[top[ra]].size + tree[top[rb]].size};
    uf.unite(ra, rb);
    top[uf.find(ra)] = id;
  }

  // Condense: walk down from the root, tracking which cluster owns a node.
  struct Cluster {
    int parent;
    double birth;
    double stability = 0.0;
    std::vector<int> children;
  };
  std::vector<Cluster> clusters{{-1, 0.0}};
  std::vector<std::pair<std::size_t, int>> stack{{2 * n - 2, 0}};
  while (!stack.empty()) {
    const auto [node, cid] = stack.back();
    stack.pop_back();
    if (node < n) continue;
    const Node& nd = tree[node];
    const double lam = nd.lambda;
    const std::size_t ls = tree[nd.left].size;
    const std::size_t rs = tree[nd.right].size;
    if (ls >= min_cluster_size && rs >= min_cluster_size) {
      clusters[cid].stability += static_cast<double>(nd.size) * (lam - clusters[cid].birth);
      for (std::size_t child : {nd.left, nd.right}) {
        clusters.push_back({cid, lam});
        const int new_id = static_cast<int>(clusters.size() - 1);
        clusters[cid].children.push_back(new_id);
        stack.emplace_back(child, new_id);
      }
    } else {
      for (std::size_t child : {nd.left, nd.right}) {
        if (tree[child].size >= min_cluster_size) {
          stack.emplace_back(child, cid);
        } else {
          clusters[cid].stability += static_cast<double>(tree[child].size) *
                                     (lam - clusters[cid].birth);
        }
      }
    }
  }

  // Excess-of-mass selection, leaves first. Children always have larger ids.
  std::vector<bool> selected(clusters.size(), false);
  std::vector<double> stab(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) stab[c] = clusters[c].stability;
  std::function<void(int)> deselect = [&](int c) {
    for (int ch : clusters[c].children) {
      selected[ch] = false;
      deselect(ch);
    }
  };
  for (std::size_t c = clusters.size(); c-- > 1;) {
    if (clusters[c].children.empty()) {
      selected[c] = true;
      continue;
    }
    double child_sum = 0.0;
    for (int ch : clusters[c].children) child_sum += stab[ch];
    if (stab[c] >= child_sum) {
      selected[c] = true;
      deselect(static_cast<int>(c));
    } else {
      stab[c] = child_sum;
    }
  }
  return static_cast<std::size_t>(std::count(selected.begin() + 1, selected.end(), true));
}

std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& r : cost) {
    if (r.size() != n) throw std::invalid_argument("hungarian needs a square matrix");
  }
  // Potentials method, 1-based with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> result(n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) result[p[j] - 1] = j - 1;
  }
  return result;
}

}  // namespace ttscorpus::speaker
