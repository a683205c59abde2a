#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curator/clustering.hpp"
#include "curator/entropy.hpp"

namespace curator {

// Uniform choice of m of n blocks without replacement, in draw order.
std::vector<std::size_t> select_hypercubes_random(std::size_t num_blocks,
                                                  std::size_t m,
                                                  std::uint64_t seed);

struct HypercubeScores {
  ClusterModel model;                       // global model over pooled values
  std::vector<ClusterDistribution> dists;   // one per block, shared labels
  EntropyGraph graph;
};

// Fits one k-means model over the cluster-variable values pooled from every
// block, forms each block's label distribution and the KL graph over blocks.
HypercubeScores score_hypercubes(std::span<const std::vector<double>> block_values,
                                 std::size_t num_clusters, std::uint64_t seed);

// Same, with the blocks' values concatenated in block order; block b holds
// block_sizes[b] values.
HypercubeScores score_hypercubes(std::span<const double> pooled,
                                 std::span<const std::size_t> block_sizes,
                                 std::size_t num_clusters, std::uint64_t seed);

// Entropy-weighted selection of m blocks without replacement by node
// strength. A constant cluster variable degrades to uniform selection.
std::vector<std::size_t> select_hypercubes_maxent(
    std::span<const std::vector<double>> block_values, std::size_t num_clusters,
    std::size_t m, std::uint64_t seed);
std::vector<std::size_t> select_hypercubes_maxent(
    std::span<const double> pooled, std::span<const std::size_t> block_sizes,
    std::size_t num_clusters, std::size_t m, std::uint64_t seed);

// Greedy snapshot selection: the snapshot of largest entropy first, then
// repeatedly the one with the largest D(candidate || mixture of selected).
// Ties go to the lowest index. Histograms must share bins.
std::vector<std::size_t> temporal_select(std::span<const std::vector<double>> histograms,
                                         std::size_t m,
                                         double epsilon = kDefaultEpsilon);

// Shannon entropy in nats of a normalized copy of `histogram`.
double shannon_entropy(std::span<const double> histogram);

}  // namespace curator
