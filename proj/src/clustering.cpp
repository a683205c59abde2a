#include "curator/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "curator/rng.hpp"

namespace curator {

namespace {

// Scaled copy of one row.
void scale_row(std::span<const double> row, const std::vector<double>& lo,
               const std::vector<double>& scale, double* out) {
  for (std::size_t d = 0; d < row.size(); ++d) out[d] = (row[d] - lo[d]) / scale[d];
}

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

struct Nearest {
  std::size_t index;
  double dist2;
};

Nearest nearest(const double* x, const std::vector<double>& centers,
                std::size_t k, std::size_t dim) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < k; ++c) {
    const double d2 = sq_dist(x, centers.data() + c * dim, dim);
    if (d2 < best.dist2) best = {c, d2};
  }
  return best;
}

// Scaled inertia over the whole input.
double scaled_inertia(const std::vector<double>& scaled, std::size_t n,
                      const std::vector<double>& centers, std::size_t k,
                      std::size_t dim) {
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    total += nearest(scaled.data() + r * dim, centers, k, dim).dist2;
  }
  return total;
}

// k-means++ over the rows listed in `pool`. Falls back to the whole data set
// when the pool runs out of distinct points.
std::vector<double> seed_plus_plus(const std::vector<double>& scaled,
                                   std::size_t n, std::size_t dim,
                                   const std::vector<std::size_t>& pool,
                                   std::size_t k, Rng& rng) {
  std::vector<double> centers;
  centers.reserve(k * dim);
  auto add_center = [&](std::size_t row) {
    centers.insert(centers.end(), scaled.begin() + static_cast<std::ptrdiff_t>(row * dim),
                   scaled.begin() + static_cast<std::ptrdiff_t>((row + 1) * dim));
  };

  add_center(pool[rng.below(pool.size())]);
  std::vector<double> d2(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    d2[i] = sq_dist(scaled.data() + pool[i] * dim, centers.data(), dim);
  }

  std::vector<double> full_d2;  // lazily built for the fallback
  while (centers.size() < k * dim) {
    double total = 0.0;
    for (double v : d2) total += v;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      std::size_t chosen = pool.size() - 1;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && target < acc) {
          chosen = i;
          break;
        }
      }
      while (d2[chosen] <= 0.0) --chosen;
      add_center(pool[chosen]);
    } else {
      // Batch exhausted: farthest point of the full data set from the
      // current centers (duplicates only if the data has < k distinct rows).
      const std::size_t have = centers.size() / dim;
      std::size_t best_row = 0;
      double best = -1.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double v = nearest(scaled.data() + r * dim, centers, have, dim).dist2;
        if (v > best) {
          best = v;
          best_row = r;
        }
      }
      add_center(best_row);
    }
    const double* c = centers.data() + centers.size() - dim;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      d2[i] = std::min(d2[i], sq_dist(scaled.data() + pool[i] * dim, c, dim));
    }
  }
  return centers;
}

}  // namespace

ClusterModel kmeans_fit(PointMatrix points, const KMeansOptions& opt) {
  const std::size_t dim = points.dim;
  if (dim < 1) throw std::invalid_argument("kmeans_fit: dimension must be >= 1");
  if (points.values.size() % dim != 0) {
    throw std::invalid_argument("kmeans_fit: value count not a multiple of dim");
  }
  const std::size_t n = points.rows();
  if (opt.k < 1) throw std::invalid_argument("kmeans_fit: k must be >= 1");
  if (n < opt.k) {
    throw std::invalid_argument("kmeans_fit: fewer points (" +
                                std::to_string(n) + ") than clusters (" +
                                std::to_string(opt.k) + ")");
  }
  for (double v : points.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("kmeans_fit: non-finite input");
  }
  const std::size_t k = opt.k;
  const std::size_t batch = opt.batch_size == 0 ? std::min<std::size_t>(1024, n)
                                                : std::min(opt.batch_size, n);

  ClusterModel model;
  model.k = k;
  model.dim = dim;
  model.seed = opt.seed;
  model.feature_min.assign(dim, std::numeric_limits<double>::infinity());
  model.feature_scale.assign(dim, 1.0);
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      model.feature_min[d] = std::min(model.feature_min[d], points.values[r * dim + d]);
      hi[d] = std::max(hi[d], points.values[r * dim + d]);
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const double range = hi[d] - model.feature_min[d];
    model.feature_scale[d] = range > 0.0 ? range : 1.0;
  }

  std::vector<double> scaled(n * dim);
  for (std::size_t r = 0; r < n; ++r) {
    scale_row(points.row(r), model.feature_min, model.feature_scale,
              scaled.data() + r * dim);
  }

  Rng rng(opt.seed);
  auto draw_batch = [&]() {
    std::vector<std::size_t> idx(batch);
    if (batch == n) {
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    } else {
      for (auto& i : idx) i = rng.below(n);
    }
    return idx;
  };

  std::vector<std::size_t> first = draw_batch();
  std::vector<double> centers = seed_plus_plus(scaled, n, dim, first, k, rng);
  const std::vector<double> initial = centers;

  std::vector<double> counts(k, 1.0);
  std::vector<std::size_t> labels(batch);
  std::vector<double> dist2(batch);
  std::vector<std::size_t> hits(k);
  std::vector<double> previous(centers.size());
  std::size_t iter = 0;
  std::vector<std::size_t> current = std::move(first);
  for (; iter < opt.max_iters; ++iter) {
    if (iter > 0) current = draw_batch();
    std::fill(hits.begin(), hits.end(), 0);
    for (std::size_t b = 0; b < batch; ++b) {
      auto near = nearest(scaled.data() + current[b] * dim, centers, k, dim);
      labels[b] = near.index;
      dist2[b] = near.dist2;
      ++hits[near.index];
    }
    previous = centers;

    // Empty-cluster repair: move an unused centroid onto the batch point
    // farthest from its nearest centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (hits[c] != 0) continue;
      std::size_t far = 0;
      for (std::size_t b = 1; b < batch; ++b) {
        if (dist2[b] > dist2[far]) far = b;
      }
      if (dist2[far] <= 0.0) continue;
      std::copy_n(scaled.data() + current[far] * dim, dim, centers.data() + c * dim);
      counts[c] = 1.0;
      dist2[far] = 0.0;
    }

    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t c = labels[b];
      if (hits[c] == 0) continue;
      counts[c] += 1.0;
      const double eta = 1.0 / counts[c];
      double* center = centers.data() + c * dim;
      const double* x = scaled.data() + current[b] * dim;
      for (std::size_t d = 0; d < dim; ++d) center[d] += eta * (x[d] - center[d]);
    }

    double shift = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      shift = std::max(shift, std::abs(centers[i] - previous[i]));
    }
    if (shift < opt.tolerance) {
      ++iter;
      break;
    }
  }
  model.iterations = iter;

  // One full-data Lloyd step: every centroid with members moves to their
  // mean. This never raises inertia and makes k = 1 land on the exact mean.
  {
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> members(k, 0);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t c = nearest(scaled.data() + r * dim, centers, k, dim).index;
      ++members[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += scaled[r * dim + d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (members[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        centers[c * dim + d] = sums[c * dim + d] / static_cast<double>(members[c]);
      }
    }
  }

  model.seeding_inertia = scaled_inertia(scaled, n, initial, k, dim);
  model.final_inertia = scaled_inertia(scaled, n, centers, k, dim);
  if (model.final_inertia > model.seeding_inertia) {
    centers = initial;
    model.final_inertia = model.seeding_inertia;
  }

  model.centroids.resize(k * dim);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < dim; ++d) {
      model.centroids[c * dim + d] =
          model.feature_min[d] + centers[c * dim + d] * model.feature_scale[d];
    }
  }
  return model;
}

namespace {

std::vector<double> scaled_centroids(const ClusterModel& model) {
  std::vector<double> out(model.centroids.size());
  for (std::size_t c = 0; c < model.k; ++c) {
    scale_row(model.centroid(c), model.feature_min, model.feature_scale,
              out.data() + c * model.dim);
  }
  return out;
}

void check_dim(const ClusterModel& model, PointMatrix points) {
  if (points.dim != model.dim || points.values.size() % model.dim != 0) {
    throw std::invalid_argument("assign: dimension mismatch");
  }
}

}  // namespace

std::vector<std::size_t> assign(const ClusterModel& model, PointMatrix points) {
  check_dim(model, points);
  const auto centers = scaled_centroids(model);
  const std::size_t n = points.rows();
  std::vector<std::size_t> labels(n);
  std::vector<double> x(model.dim);
  for (std::size_t r = 0; r < n; ++r) {
    scale_row(points.row(r), model.feature_min, model.feature_scale, x.data());
    labels[r] = nearest(x.data(), centers, model.k, model.dim).index;
  }
  return labels;
}

double inertia(const ClusterModel& model, PointMatrix points) {
  check_dim(model, points);
  const auto centers = scaled_centroids(model);
  std::vector<double> x(model.dim);
  double total = 0.0;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    scale_row(points.row(r), model.feature_min, model.feature_scale, x.data());
    total += nearest(x.data(), centers, model.k, model.dim).dist2;
  }
  return total;
}

ClusterDistribution cluster_distribution(std::span<const std::size_t> labels,
                                         std::size_t k) {
  if (labels.empty()) throw std::invalid_argument("cluster_distribution: no labels");
  if (k < 1) throw std::invalid_argument("cluster_distribution: k must be >= 1");
  std::vector<std::size_t> counts(k, 0);
  for (auto l : labels) {
    if (l >= k) throw std::invalid_argument("cluster_distribution: label out of range");
    ++counts[l];
  }
  ClusterDistribution d;
  d.p.resize(k);
  const double n = static_cast<double>(labels.size());
  for (std::size_t c = 0; c < k; ++c) d.p[c] = static_cast<double>(counts[c]) / n;
  return d;
}

}  // namespace curator
