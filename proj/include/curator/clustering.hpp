#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curator/entropy.hpp"

namespace curator {

// Row-major n x d view over point coordinates.
struct PointMatrix {
  std::span<const double> values;
  std::size_t dim = 1;

  std::size_t rows() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t r) const {
    return values.subspan(r * dim, dim);
  }
};

struct KMeansOptions {
  std::size_t k = 20;
  std::size_t batch_size = 0;  // 0: min(1024, n)
  std::size_t max_iters = 100;
  double tolerance = 1e-6;     // fraction of the data range
  std::uint64_t seed = 0;
};

// Fitted centroids. Features are min-max scaled to [0, 1] for clustering;
// centroids are reported in original units and distances for assignment
// are taken in the scaled space the model was fitted in.
struct ClusterModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;  // k x dim, original units
  std::vector<double> feature_min;
  std::vector<double> feature_scale;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double seeding_inertia = 0.0;  // full-data inertia of the k-means++ start
  double final_inertia = 0.0;    // full-data inertia of the returned centroids

  std::span<const double> centroid(std::size_t c) const {
    return std::span<const double>(centroids).subspan(c * dim, dim);
  }
};

// Mini-batch k-means: k-means++ seeding on the first batch, then per-centroid
// learning rate 1/(assignment count), then one full-data Lloyd step.
// Deterministic for a given seed. The returned model is never worse
// (full-data inertia) than its seeding.
ClusterModel kmeans_fit(PointMatrix points, const KMeansOptions& options);

// Nearest centroid per point; ties go to the lowest index.
std::vector<std::size_t> assign(const ClusterModel& model, PointMatrix points);

// Sum of squared scaled distances to the assigned centroid.
double inertia(const ClusterModel& model, PointMatrix points);

// p_c = count(c) / n over labels in [0, k).
ClusterDistribution cluster_distribution(std::span<const std::size_t> labels,
                                         std::size_t k);

}  // namespace curator
