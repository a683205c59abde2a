#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curator/clustering.hpp"
#include "curator/config.hpp"
#include "curator/grid.hpp"
#include "curator/rng.hpp"

namespace curator {

// One curated grid point.
struct SampleRecord {
  std::size_t timestep = 0;
  Index3 index{0, 0, 0};                 // global grid indices
  std::array<double, 4> coords{0, 0, 0, 0};  // x, y, z, t normalized to [0, 1]
  std::vector<double> values;            // one per SampleSet variable

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// ---------------------------------------------------------------------------
// Point selection inside one block. Selectors return block-local linear
// indices (x-fastest), distinct, in ascending order.

std::vector<std::size_t> select_full(std::size_t volume);

std::vector<std::size_t> select_random(std::size_t volume, std::size_t n,
                                       Rng& rng);

// Spatial strata: the block is split into strata[0] x strata[1] x strata[2]
// near-equal sub-boxes; n is apportioned by stratum volume (largest
// remainder) and drawn uniformly without replacement inside each stratum.
std::vector<std::size_t> select_stratified(const Extents3& extents,
                                           std::size_t n,
                                           const Extents3& strata, Rng& rng);

// Bounds [lo, hi) of stratum `s` of `count` along an axis of `extent`.
std::array<std::size_t, 2> stratum_bounds(std::size_t extent, std::size_t count,
                                          std::size_t s);

// n-point Latin hypercube in [0,1)^3: on each axis, every interval
// [m/n, (m+1)/n) holds exactly one point.
std::vector<std::array<double, 3>> latin_hypercube(std::size_t n, Rng& rng);

// Latin hypercube snapped to the block grid; a point whose grid cell is
// taken moves to the nearest unused grid point.
std::vector<std::size_t> select_lhs(const Extents3& extents, std::size_t n,
                                    Rng& rng);

struct UipsDiagnostics {
  double acceptance_constant = 0.0;  // c, in density units
  std::size_t accepted_before_adjust = 0;
  int bisection_iterations = 0;
  bool fell_back_to_random = false;
};

// Uniform-in-phase-space selection with a binned density estimate over
// `features` (1-4 columns). Points are accepted with probability
// min(1, c / density), c bisected so the expected count is n, then the
// accepted set is trimmed or topped up to exactly n.
std::vector<std::size_t> select_uips(PointMatrix features, std::size_t n,
                                     std::size_t bins_per_dim, Rng& rng,
                                     UipsDiagnostics* diagnostics = nullptr);

struct MaxentPointOptions {
  std::size_t num_clusters = 20;
  std::size_t bins = 100;
};

// Two-step point selection inside a block: k-means on the cluster
// variable, one histogram per cluster over shared bins, KL graph over the
// clusters, node-strength allocation capped by cluster size, uniform draws
// inside each cluster.
std::vector<std::size_t> select_maxent_points(std::span<const double> cluster_values,
                                              std::size_t n,
                                              const MaxentPointOptions& options,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Record-producing wrappers.

std::vector<SampleRecord> make_records(const HypercubeBlock& block,
                                       std::span<const std::size_t> local_indices);

std::vector<SampleRecord> sample_full(const HypercubeBlock& block);
std::vector<SampleRecord> sample_random(const HypercubeBlock& block,
                                        std::size_t n, std::uint64_t seed);
std::vector<SampleRecord> sample_stratified(const HypercubeBlock& block,
                                            std::size_t n,
                                            const Extents3& strata,
                                            std::uint64_t seed);
std::vector<SampleRecord> sample_lhs(const HypercubeBlock& block, std::size_t n,
                                     std::uint64_t seed);
std::vector<SampleRecord> sample_uips(const HypercubeBlock& block, std::size_t n,
                                      std::size_t bins_per_dim,
                                      const std::vector<std::string>& feature_vars,
                                      std::uint64_t seed);
std::vector<SampleRecord> sample_maxent_points(const HypercubeBlock& block,
                                               const std::string& cluster_var,
                                               std::size_t num_clusters,
                                               std::size_t n, std::uint64_t seed);

// Parameters the pipeline passes to every cube.
struct PointSamplerParams {
  PointMethod method = PointMethod::random;
  std::size_t num_samples = 0;
  std::size_t num_clusters = 20;
  std::size_t bins = 100;
  Extents3 strata{4, 4, 4};
  std::vector<std::string> uips_vars;
  std::string cluster_var;
};

// Dispatches to the configured method; sorted local indices.
std::vector<std::size_t> sample_block(const HypercubeBlock& block,
                                      const PointSamplerParams& params,
                                      std::uint64_t seed);

}  // namespace curator
