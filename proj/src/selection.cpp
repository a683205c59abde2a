#include "curator/selection.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "curator/rng.hpp"

namespace curator {

namespace {
constexpr std::uint64_t kSaltKMeans = 0x6B6D6561ULL;
constexpr std::uint64_t kSaltPick = 0x7069636BULL;
}  // namespace

std::vector<std::size_t> select_hypercubes_random(std::size_t num_blocks,
                                                  std::size_t m,
                                                  std::uint64_t seed) {
  if (m > num_blocks) {
    throw std::invalid_argument("cannot select " + std::to_string(m) +
                                " hypercubes from " + std::to_string(num_blocks));
  }
  std::vector<std::size_t> idx(num_blocks);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(num_blocks - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  return idx;
}

HypercubeScores score_hypercubes(std::span<const double> pooled,
                                 std::span<const std::size_t> block_sizes,
                                 std::size_t num_clusters, std::uint64_t seed) {
  if (block_sizes.empty()) throw std::invalid_argument("no blocks to score");
  std::size_t total = 0;
  for (auto n : block_sizes) {
    if (n == 0) throw std::invalid_argument("empty block");
    total += n;
  }
  if (total != pooled.size()) {
    throw std::invalid_argument("block sizes do not match the pooled values");
  }

  HypercubeScores out;
  KMeansOptions opt;
  opt.k = num_clusters;
  opt.seed = mix_seed({seed, kSaltKMeans});
  out.model = kmeans_fit(PointMatrix{pooled, 1}, opt);
  out.dists.reserve(block_sizes.size());
  std::size_t offset = 0;
  for (auto n : block_sizes) {
    const auto labels = assign(out.model, PointMatrix{pooled.subspan(offset, n), 1});
    out.dists.push_back(cluster_distribution(labels, num_clusters));
    offset += n;
  }
  out.graph = adjacency_matrix(out.dists);
  return out;
}

HypercubeScores score_hypercubes(std::span<const std::vector<double>> block_values,
                                 std::size_t num_clusters, std::uint64_t seed) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& b : block_values) {
    pooled.insert(pooled.end(), b.begin(), b.end());
    sizes.push_back(b.size());
  }
  return score_hypercubes(pooled, sizes, num_clusters, seed);
}

std::vector<std::size_t> select_hypercubes_maxent(
    std::span<const double> pooled, std::span<const std::size_t> block_sizes,
    std::size_t num_clusters, std::size_t m, std::uint64_t seed) {
  if (m > block_sizes.size()) {
    throw std::invalid_argument("cannot select " + std::to_string(m) +
                                " hypercubes from " +
                                std::to_string(block_sizes.size()));
  }
  if (num_clusters < 1) throw std::invalid_argument("num_clusters must be >= 1");
  const auto scores = score_hypercubes(pooled, block_sizes, num_clusters, seed);
  return weighted_sample(scores.graph.strengths, m, mix_seed({seed, kSaltPick}),
                         false);
}

std::vector<std::size_t> select_hypercubes_maxent(
    std::span<const std::vector<double>> block_values, std::size_t num_clusters,
    std::size_t m, std::uint64_t seed) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& b : block_values) {
    pooled.insert(pooled.end(), b.begin(), b.end());
    sizes.push_back(b.size());
  }
  return select_hypercubes_maxent(pooled, sizes, num_clusters, m, seed);
}

double shannon_entropy(std::span<const double> histogram) {
  double total = 0.0;
  for (double v : histogram) total += v;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double v : histogram) {
    if (v > 0.0) {
      const double p = v / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

std::vector<std::size_t> temporal_select(std::span<const std::vector<double>> histograms,
                                         std::size_t m, double epsilon) {
  const std::size_t count = histograms.size();
  if (m > count) {
    throw std::invalid_argument("temporal_select: budget exceeds snapshot count");
  }
  if (m == 0) return {};
  const std::size_t bins = histograms.front().size();
  std::vector<std::vector<double>> p;
  p.reserve(count);
  for (const auto& h : histograms) {
    if (h.size() != bins) {
      throw std::invalid_argument("temporal_select: histograms must share bins");
    }
    double total = 0.0;
    for (double v : h) {
      if (v < 0.0) throw std::invalid_argument("temporal_select: negative bin");
      total += v;
    }
    std::vector<double> norm(bins, 0.0);
    if (total > 0.0) {
      for (std::size_t b = 0; b < bins; ++b) norm[b] = h[b] / total;
    }
    p.push_back(std::move(norm));
  }

  std::vector<bool> chosen(count, false);
  std::vector<std::size_t> out;
  std::size_t first = 0;
  double best = -1.0;
  for (std::size_t t = 0; t < count; ++t) {
    const double h = shannon_entropy(p[t]);
    if (h > best) {
      best = h;
      first = t;
    }
  }
  out.push_back(first);
  chosen[first] = true;

  std::vector<double> sum = p[first];
  while (out.size() < m) {
    std::vector<double> mixture(bins);
    const double inv = 1.0 / static_cast<double>(out.size());
    for (std::size_t b = 0; b < bins; ++b) mixture[b] = sum[b] * inv;
    std::size_t pick = count;
    double gain = -1.0;
    for (std::size_t t = 0; t < count; ++t) {
      if (chosen[t]) continue;
      const double g = kl_divergence(p[t], mixture, epsilon);
      if (g > gain) {
        gain = g;
        pick = t;
      }
    }
    out.push_back(pick);
    chosen[pick] = true;
    for (std::size_t b = 0; b < bins; ++b) sum[b] += p[pick][b];
  }
  return out;
}

}  // namespace curator
