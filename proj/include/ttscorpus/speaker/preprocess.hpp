#pragma once

#include <cstdint>
#include <vector>

#include "ttscorpus/providers/provider.hpp"
#include "ttscorpus/speaker/clustering.hpp"

namespace ttscorpus::speaker {

struct ReductionConfig {
  bool enabled = false;
  int target_dimension = 16;
  int neighbors = 15;
  int epochs = 200;
  double min_dist = 0.1;
  std::uint64_t seed = 42;
};

struct PreprocessConfig {
  double outlier_sigma = 3.0;
  ReductionConfig reduction;
};

struct PreprocessResult {
  Points points;                 ///< unit vectors, or the reduced layout
  std::vector<std::size_t> kept;  ///< input index of each output point
};

/// Drops points farther from the centroid than mean + sigma * stddev of all
/// such distances, L2-normalizes the rest and optionally reduces them.
/// Throws std::invalid_argument for fewer than 2 embeddings.
PreprocessResult preprocess_embeddings(const std::vector<providers::Embedding>& embeddings,
                                       const PreprocessConfig& config = {});

/// Fuzzy-neighbour-graph layout optimized by stochastic gradient descent
/// (the UMAP construction). Deterministic for a given seed.
Points reduce_dimension(const Points& points, const ReductionConfig& config);

}  // namespace ttscorpus::speaker
