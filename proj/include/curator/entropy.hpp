#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "curator/rng.hpp"

namespace curator {

inline constexpr double kDefaultEpsilon = 1e-10;

// Discrete probability vector over a label space shared by every
// distribution it is compared with.
struct ClusterDistribution {
  std::vector<double> p;

  std::size_t size() const { return p.size(); }

  // Normalizes nonnegative counts. Throws if empty or all zero.
  static ClusterDistribution from_counts(std::span<const double> counts);
  // Throws std::invalid_argument unless entries are >= 0 and sum to 1
  // within 1e-9.
  void validate() const;
};

// D(p || q) in nats after epsilon smoothing, v' = (v + eps) / (1 + k eps).
// Always >= 0.
double kl_divergence(const ClusterDistribution& p, const ClusterDistribution& q,
                     double epsilon = kDefaultEpsilon);
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon = kDefaultEpsilon);

// Pairwise divergence matrix (row-major, A(i,j) = D(i || j), zero diagonal)
// and its row sums, the node strengths.
struct EntropyGraph {
  std::size_t n = 0;
  std::vector<double> adjacency;
  std::vector<double> strengths;

  double at(std::size_t i, std::size_t j) const { return adjacency[i * n + j]; }
};

EntropyGraph adjacency_matrix(std::span<const ClusterDistribution> dists,
                              double epsilon = kDefaultEpsilon);

// Draws n indices with P(i) proportional to weights[i], in draw order.
// Without replacement, chosen indices are removed and the rest renormalized.
// All-zero (remaining) weights fall back to uniform with a warning.
std::vector<std::size_t> weighted_sample(std::span<const double> weights,
                                         std::size_t n, Rng& rng,
                                         bool with_replacement);
std::vector<std::size_t> weighted_sample(std::span<const double> weights,
                                         std::size_t n, std::uint64_t seed,
                                         bool with_replacement);

// Integer allocation of n_total proportional to strengths using the
// largest-remainder rule (ties to the lowest index). With capacities, no
// entry exceeds its capacity and overflow is redistributed by remaining
// strength. All-zero strengths split uniformly.
std::vector<std::size_t> allocate_counts(
    std::span<const double> strengths, long long n_total,
    std::optional<std::span<const std::size_t>> capacities = std::nullopt);

}  // namespace curator
