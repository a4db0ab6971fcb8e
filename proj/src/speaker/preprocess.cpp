#include "ttscorpus/speaker/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ttscorpus::speaker {

PreprocessResult preprocess_embeddings(const std::vector<providers::Embedding>& embeddings,
                                       const PreprocessConfig& config) {
  if (embeddings.size() < 2) throw std::invalid_argument("need at least 2 embeddings");
  const std::size_t dim = embeddings.front().dimension();
  for (const auto& e : embeddings) {
    if (e.dimension() != dim || !e.valid()) {
      throw std::invalid_argument("embeddings must be valid and of equal dimension");
    }
  }
  const std::size_t n = embeddings.size();
  std::vector<double> center(dim, 0.0);
  for (const auto& e : embeddings) {
    for (std::size_t j = 0; j < dim; ++j) center[j] += e.values()[j] / static_cast<double>(n);
  }
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = distance(embeddings[i].values(), center, Metric::euclidean);
  const double mean = std::accumulate(dist.begin(), dist.end(), 0.0) / n;
  double var = 0.0;
  for (double d : dist) var += (d - mean) * (d - mean);
  const double limit = mean + config.outlier_sigma * std::sqrt(var / n);

  PreprocessResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] > limit) continue;
    out.kept.push_back(i);
    out.points.push_back(embeddings[i].normalized().values());
  }
  if (config.reduction.enabled && out.points.size() > 2) {
    out.points = reduce_dimension(out.points, config.reduction);
  }
  return out;
}

namespace {

/// Curve parameters of 1 / (1 + a d^(2b)) fitted for spread 1.
std::pair<double, double> curve_params(double min_dist) {
  // Least squares on a grid, like the reference implementation's curve fit.
  double best_a = 1.577, best_b = 0.895, best_err = INFINITY;
  for (double b = 0.5; b <= 1.5; b += 0.005) {
    double num = 0.0, den = 0.0;
    // For fixed b, fit a by Gauss-Newton on a few iterations.
    double a = 1.0;
    for (int it = 0; it < 30; ++it) {
      num = den = 0.0;
      for (double x = 0.0; x <= 3.0; x += 0.01) {
        const double target = x < min_dist ? 1.0 : std::exp(-(x - min_dist));
        const double p = std::pow(x, 2 * b);
        const double f = 1.0 / (1.0 + a * p);
        const double df = -p * f * f;
        num += df * (target - f);
        den += df * df;
      }
      if (den <= 0.0) break;
      a = std::max(1e-3, a + num / den);
    }
    double err = 0.0;
    for (double x = 0.0; x <= 3.0; x += 0.01) {
      const double target = x < min_dist ? 1.0 : std::exp(-(x - min_dist));
      const double f = 1.0 / (1.0 + a * std::pow(x, 2 * b));
      err += (target - f) * (target - f);
    }
    if (err < best_err) {
      best_err = err;
      best_a = a;
      best_b = b;
    }
  }
  return {best_a, best_b};
}

}  // namespace

Points reduce_dimension(const Points& points, const ReductionConfig& config) {
  const std::size_t n = points.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.neighbors), n - 1);
  const auto dim = static_cast<std::size_t>(config.target_dimension);
  if (k < 1 || dim < 1) throw std::invalid_argument("reduction needs neighbours and a dimension");

  // Fuzzy k-neighbour graph.
  std::vector<std::vector<std::pair<double, std::size_t>>> knn(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) all.emplace_back(distance(points[i], points[j], Metric::euclidean), j);
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    all.resize(k);
    knn[i] = std::move(all);
  }
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  const double target = std::log2(static_cast<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    double rho = 0.0;
    for (const auto& [d, j] : knn[i]) {
      if (d > 0.0) {
        rho = d;
        break;
      }
    }
    double lo = 0.0, hi = INFINITY, sigma = 1.0;
    for (int it = 0; it < 64; ++it) {
      double sum = 0.0;
      for (const auto& [d, j] : knn[i]) sum += std::exp(-std::max(0.0, d - rho) / sigma);
      if (std::abs(sum - target) < 1e-5) break;
      if (sum > target) {
        hi = sigma;
        sigma = (lo + hi) / 2.0;
      } else {
        lo = sigma;
        sigma = std::isinf(hi) ? sigma * 2.0 : (lo + hi) / 2.0;
      }
    }
    for (const auto& [d, j] : knn[i]) w[i][j] = std::exp(-std::max(0.0, d - rho) / sigma);
  }
  struct Edge {
    std::size_t i, j;
    double w;
  };
  std::vector<Edge> edges;
  double w_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = w[i][j] + w[j][i] - w[i][j] * w[j][i];
      if (v > 0.0) {
        edges.push_back({i, j, v});
        w_max = std::max(w_max, v);
      }
    }
  }

  const auto [a, b] = curve_params(config.min_dist);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-10.0, 10.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  Points y(n, std::vector<double>(dim));
  for (auto& p : y) {
    for (double& v : p) v = init(rng);
  }
  auto sq = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) s += (y[i][c] - y[j][c]) * (y[i][c] - y[j][c]);
    return s;
  };
  auto clip = [](double g) { return std::clamp(g, -4.0, 4.0); };
  constexpr int kNegatives = 5;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = 1.0 - static_cast<double>(epoch) / config.epochs;
    for (const Edge& e : edges) {
      if (coin(rng) > e.w / w_max) continue;
      const double d2 = sq(e.i, e.j);
      if (d2 > 0.0) {
        const double coeff =
            -2.0 * a * b * std::pow(d2, b - 1.0) / (1.0 + a * std::pow(d2, b));
        for (std::size_t c = 0; c < dim; ++c) {
          const double g = clip(coeff * (y[e.i][c] - y[e.j][c])) * lr;
          y[e.i][c] += g;
          y[e.j][c] -= g;
        }
      }
      for (int s = 0; s < kNegatives; ++s) {
        const std::size_t o = any(rng);
        if (o == e.i) continue;
        const double nd2 = sq(e.i, o);
        const double coeff = 2.0 * b / ((0.001 + nd2) * (1.0 + a * std::pow(nd2, b)));
        for (std::size_t c = 0; c < dim; ++c) {
          const double g = nd2 > 0.0 ? clip(coeff * (y[e.i][c] - y[o][c])) : 4.0;
          y[e.i][c] += g * lr;
        }
      }
    }
  }
  return y;
}

}  // namespace ttscorpus::speaker
