#include "curator/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "curator/entropy.hpp"
#include "curator/log.hpp"

namespace curator {

namespace {

// Salts for sub-streams inside one cube.
constexpr std::uint64_t kSaltCluster = 0x636C7573ULL;
constexpr std::uint64_t kSaltDraw = 0x64726177ULL;

void check_count(std::size_t n, std::size_t volume) {
  if (n > volume) {
    throw std::invalid_argument("requested " + std::to_string(n) +
                                " samples from a block of " +
                                std::to_string(volume) + " points");
  }
}

// First n entries of a partial Fisher-Yates shuffle of `pool`.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool,
                                                  std::size_t n, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<std::size_t> select_full(std::size_t volume) {
  std::vector<std::size_t> out(volume);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

std::vector<std::size_t> select_random(std::size_t volume, std::size_t n,
                                       Rng& rng) {
  check_count(n, volume);
  return sorted(draw_without_replacement(select_full(volume), n, rng));
}

std::array<std::size_t, 2> stratum_bounds(std::size_t extent, std::size_t count,
                                          std::size_t s) {
  return {s * extent / count, (s + 1) * extent / count};
}

std::vector<std::size_t> select_stratified(const Extents3& extents,
                                           std::size_t n,
                                           const Extents3& strata, Rng& rng) {
  const std::size_t volume = extents[0] * extents[1] * extents[2];
  check_count(n, volume);
  Extents3 g;
  for (int a = 0; a < 3; ++a) {
    if (strata[a] < 1) throw std::invalid_argument("strata must be >= 1");
    g[a] = std::min(strata[a], extents[a]);
  }
  const std::size_t n_strata = g[0] * g[1] * g[2];
  if (n < n_strata) {
    throw std::invalid_argument("stratified sampling needs n >= stratum count (" +
                                std::to_string(n_strata) + ")");
  }

  std::vector<std::array<std::array<std::size_t, 2>, 3>> bounds;
  std::vector<double> weight;
  std::vector<std::size_t> capacity;
  for (std::size_t sz = 0; sz < g[2]; ++sz) {
    for (std::size_t sy = 0; sy < g[1]; ++sy) {
      for (std::size_t sx = 0; sx < g[0]; ++sx) {
        std::array<std::array<std::size_t, 2>, 3> b{
            stratum_bounds(extents[0], g[0], sx),
            stratum_bounds(extents[1], g[1], sy),
            stratum_bounds(extents[2], g[2], sz)};
        const std::size_t vol =
            (b[0][1] - b[0][0]) * (b[1][1] - b[1][0]) * (b[2][1] - b[2][0]);
        bounds.push_back(b);
        weight.push_back(static_cast<double>(vol));
        capacity.push_back(vol);
      }
    }
  }

  // Every stratum gets one point first so none is left empty, then the rest
  // is apportioned by volume.
  std::vector<std::size_t> counts(n_strata, 1);
  std::vector<std::size_t> room(n_strata);
  for (std::size_t s = 0; s < n_strata; ++s) room[s] = capacity[s] - 1;
  auto extra = allocate_counts(weight, static_cast<long long>(n - n_strata),
                               std::span<const std::size_t>(room));
  for (std::size_t s = 0; s < n_strata; ++s) counts[s] += extra[s];

  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n_strata; ++s) {
    const auto& b = bounds[s];
    std::vector<std::size_t> pool;
    pool.reserve(capacity[s]);
    for (std::size_t k = b[2][0]; k < b[2][1]; ++k) {
      for (std::size_t j = b[1][0]; j < b[1][1]; ++j) {
        for (std::size_t i = b[0][0]; i < b[0][1]; ++i) {
          pool.push_back((k * extents[1] + j) * extents[0] + i);
        }
      }
    }
    auto picked = draw_without_replacement(std::move(pool), counts[s], rng);
    out.insert(out.end(), picked.begin(), picked.end());
  }
  return sorted(std::move(out));
}

std::vector<std::array<double, 3>> latin_hypercube(std::size_t n, Rng& rng) {
  std::vector<std::array<double, 3>> points(n);
  std::vector<std::size_t> perm(n);
  for (int a = 0; a < 3; ++a) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
      std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      points[i][a] = (static_cast<double>(perm[i]) + rng.uniform()) /
                     static_cast<double>(n);
    }
  }
  return points;
}

std::vector<std::size_t> select_lhs(const Extents3& extents, std::size_t n,
                                    Rng& rng) {
  const std::size_t volume = extents[0] * extents[1] * extents[2];
  check_count(n, volume);
  const auto design = latin_hypercube(n, rng);
  std::vector<bool> used(volume, false);
  std::vector<std::size_t> out;
  out.reserve(n);

  auto linear = [&](long i, long j, long k) {
    return (static_cast<std::size_t>(k) * extents[1] + static_cast<std::size_t>(j)) *
               extents[0] +
           static_cast<std::size_t>(i);
  };
  const long ex = static_cast<long>(extents[0]);
  const long ey = static_cast<long>(extents[1]);
  const long ez = static_cast<long>(extents[2]);
  const long max_extent = std::max({ex, ey, ez});

  for (const auto& u : design) {
    // Grid point a sits at (a + 0.5) / extent in unit coordinates.
    std::array<double, 3> pos;
    std::array<long, 3> base;
    for (int a = 0; a < 3; ++a) {
      const auto e = static_cast<double>(extents[a]);
      pos[a] = u[a] * e - 0.5;
      base[a] = std::min<long>(static_cast<long>(extents[a]) - 1,
                               static_cast<long>(std::floor(u[a] * e)));
    }
    std::size_t chosen = linear(base[0], base[1], base[2]);
    if (used[chosen]) {
      double best_d2 = std::numeric_limits<double>::infinity();
      std::size_t best = volume;
      for (long r = 1; r <= max_extent; ++r) {
        const double reach = static_cast<double>(r) - 0.5;
        if (best < volume && reach * reach > best_d2) break;
        for (long dk = -r; dk <= r; ++dk) {
          const long k = base[2] + dk;
          if (k < 0 || k >= ez) continue;
          for (long dj = -r; dj <= r; ++dj) {
            const long j = base[1] + dj;
            if (j < 0 || j >= ey) continue;
            for (long di = -r; di <= r; ++di) {
              if (std::max({std::labs(di), std::labs(dj), std::labs(dk)}) != r) continue;
              const long i = base[0] + di;
              if (i < 0 || i >= ex) continue;
              const std::size_t idx = linear(i, j, k);
              if (used[idx]) continue;
              const double d2 = (i - pos[0]) * (i - pos[0]) +
                                (j - pos[1]) * (j - pos[1]) +
                                (k - pos[2]) * (k - pos[2]);
              if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                best_d2 = d2;
                best = idx;
              }
            }
          }
        }
      }
      chosen = best;
    }
    used[chosen] = true;
    out.push_back(chosen);
  }
  return sorted(std::move(out));
}

std::vector<std::size_t> select_uips(PointMatrix features, std::size_t n,
                                     std::size_t bins_per_dim, Rng& rng,
                                     UipsDiagnostics* diagnostics) {
  const std::size_t dim = features.dim;
  if (dim < 1 || dim > 4) {
    throw std::invalid_argument("uips supports 1 to 4 feature dimensions");
  }
  if (bins_per_dim < 1) throw std::invalid_argument("bins_per_dim must be >= 1");
  const std::size_t volume = features.rows();
  check_count(n, volume);
  UipsDiagnostics diag;

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < volume; ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], features.values[r * dim + d]);
      hi[d] = std::max(hi[d], features.values[r * dim + d]);
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (!(hi[d] > lo[d])) {
      warn("uips: feature " + std::to_string(d) +
           " is constant; falling back to random sampling");
      diag.fell_back_to_random = true;
      if (diagnostics) *diagnostics = diag;
      return select_random(volume, n, rng);
    }
  }

  // Bin id per point and occupancy counts.
  const auto bins = static_cast<double>(bins_per_dim);
  std::vector<std::uint64_t> bin_of(volume);
  std::unordered_map<std::uint64_t, std::size_t> occupancy;
  for (std::size_t r = 0; r < volume; ++r) {
    std::uint64_t id = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double t = (features.values[r * dim + d] - lo[d]) / (hi[d] - lo[d]);
      const auto b = std::min<std::uint64_t>(
          bins_per_dim - 1, static_cast<std::uint64_t>(std::floor(t * bins)));
      id = id * bins_per_dim + b;
    }
    bin_of[r] = id;
    ++occupancy[id];
  }
  double bin_volume = 1.0;
  for (std::size_t d = 0; d < dim; ++d) bin_volume *= (hi[d] - lo[d]) / bins;
  const double to_density = 1.0 / (static_cast<double>(volume) * bin_volume);

  // In count units the acceptance probability is min(1, a / count(bin)), so
  // the expected number accepted is sum over bins of min(count, a).
  std::vector<double> bin_counts;
  bin_counts.reserve(occupancy.size());
  for (const auto& [_, c] : occupancy) bin_counts.push_back(static_cast<double>(c));
  std::sort(bin_counts.begin(), bin_counts.end());
  auto expected = [&](double a) {
    double e = 0.0;
    for (double c : bin_counts) e += std::min(c, a);
    return e;
  };
  const double target = static_cast<double>(n);
  double a_lo = 0.0;
  double a_hi = bin_counts.back();
  double a = a_hi;
  for (int it = 0; it < 30; ++it) {
    a = 0.5 * (a_lo + a_hi);
    diag.bisection_iterations = it + 1;
    const double e = expected(a);
    if (std::abs(e - target) <= 0.01 * target) break;
    if (e < target) {
      a_lo = a;
    } else {
      a_hi = a;
    }
  }
  diag.acceptance_constant = a * to_density;

  std::vector<double> prob(volume);
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> rejected;
  for (std::size_t r = 0; r < volume; ++r) {
    prob[r] = std::min(1.0, a / static_cast<double>(occupancy[bin_of[r]]));
    if (rng.uniform() < prob[r]) {
      accepted.push_back(r);
    } else {
      rejected.push_back(r);
    }
  }
  diag.accepted_before_adjust = accepted.size();

  if (accepted.size() > n) {
    accepted = draw_without_replacement(std::move(accepted), n, rng);
  } else if (accepted.size() < n) {
    // Top up from the rejected points, still favouring sparse bins.
    std::vector<double> w(rejected.size());
    for (std::size_t i = 0; i < rejected.size(); ++i) w[i] = prob[rejected[i]];
    for (auto pick : weighted_sample(w, n - accepted.size(), rng, false)) {
      accepted.push_back(rejected[pick]);
    }
  }
  if (diagnostics) *diagnostics = diag;
  return sorted(std::move(accepted));
}

std::vector<std::size_t> select_maxent_points(std::span<const double> values,
                                              std::size_t n,
                                              const MaxentPointOptions& options,
                                              std::uint64_t seed) {
  const std::size_t volume = values.size();
  check_count(n, volume);
  if (options.num_clusters < 1) throw std::invalid_argument("num_clusters must be >= 1");
  if (options.bins < 1) throw std::invalid_argument("bins must be >= 1");
  if (n == 0) return {};

  std::vector<double> uniq(values.begin(), values.end());
  std::sort(uniq.begin(), uniq.end());
  const std::size_t distinct =
      static_cast<std::size_t>(std::unique(uniq.begin(), uniq.end()) - uniq.begin());
  std::size_t k = options.num_clusters;
  if (distinct < k) {
    std::ostringstream msg;
    msg << "maxent: only " << distinct << " distinct cluster values; reducing "
        << "clusters from " << k << " to " << distinct;
    warn(msg.str());
    k = distinct;
  }

  KMeansOptions km;
  km.k = k;
  km.seed = mix_seed({seed, kSaltCluster});
  const PointMatrix pm{values, 1};
  const ClusterModel model = kmeans_fit(pm, km);
  const auto labels = assign(model, pm);

  // Per-cluster histograms of the cluster variable over shared bins.
  const double lo = uniq.front();
  const double hi = uniq[distinct - 1];
  const double width = hi > lo ? (hi - lo) / static_cast<double>(options.bins) : 1.0;
  std::vector<std::vector<double>> hist(k, std::vector<double>(options.bins, 0.0));
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t r = 0; r < volume; ++r) {
    const auto b = hi > lo ? std::min<std::size_t>(
                                 options.bins - 1,
                                 static_cast<std::size_t>((values[r] - lo) / width))
                           : 0;
    hist[labels[r]][b] += 1.0;
    members[labels[r]].push_back(r);
  }

  std::vector<std::size_t> occupied;
  std::vector<ClusterDistribution> dists;
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].empty()) continue;
    occupied.push_back(c);
    dists.push_back(ClusterDistribution::from_counts(hist[c]));
  }
  const EntropyGraph graph = adjacency_matrix(dists);
  std::vector<std::size_t> capacity(occupied.size());
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    capacity[i] = members[occupied[i]].size();
  }
  if (std::all_of(graph.strengths.begin(), graph.strengths.end(),
                  [](double s) { return s == 0.0; }) &&
      occupied.size() > 1) {
    warn("maxent: all cluster strengths are zero; allocating uniformly");
  }
  const auto counts = allocate_counts(graph.strengths, static_cast<long long>(n),
                                      std::span<const std::size_t>(capacity));

  Rng rng(mix_seed({seed, kSaltDraw}));
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    auto picked = draw_without_replacement(members[occupied[i]], counts[i], rng);
    out.insert(out.end(), picked.begin(), picked.end());
  }
  return sorted(std::move(out));
}

std::vector<SampleRecord> make_records(const HypercubeBlock& block,
                                       std::span<const std::size_t> local) {
  const auto& g = block.grid;
  auto norm = [](std::size_t v, std::size_t extent) {
    return extent > 1 ? static_cast<double>(v) / static_cast<double>(extent - 1) : 0.0;
  };
  std::vector<SampleRecord> out;
  out.reserve(local.size());
  const double t = norm(block.desc.timestep, g.nt);
  for (std::size_t idx : local) {
    if (idx >= block.volume()) throw std::out_of_range("local index outside block");
    SampleRecord rec;
    rec.timestep = block.desc.timestep;
    rec.index = block.global_index(idx);
    rec.coords = {norm(rec.index[0], g.nx), norm(rec.index[1], g.ny),
                  norm(rec.index[2], g.nz), t};
    rec.values.reserve(block.values.size());
    for (const auto& column : block.values) rec.values.push_back(column[idx]);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SampleRecord> sample_full(const HypercubeBlock& block) {
  return make_records(block, select_full(block.volume()));
}

std::vector<SampleRecord> sample_random(const HypercubeBlock& block,
                                        std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return make_records(block, select_random(block.volume(), n, rng));
}

std::vector<SampleRecord> sample_stratified(const HypercubeBlock& block,
                                            std::size_t n,
                                            const Extents3& strata,
                                            std::uint64_t seed) {
  Rng rng(seed);
  return make_records(block, select_stratified(block.desc.extents, n, strata, rng));
}

std::vector<SampleRecord> sample_lhs(const HypercubeBlock& block, std::size_t n,
                                     std::uint64_t seed) {
  Rng rng(seed);
  return make_records(block, select_lhs(block.desc.extents, n, rng));
}

namespace {

std::vector<double> feature_rows(const HypercubeBlock& block,
                                 const std::vector<std::string>& vars) {
  const std::size_t volume = block.volume();
  std::vector<double> rows(volume * vars.size());
  for (std::size_t d = 0; d < vars.size(); ++d) {
    auto col = block.values_of(vars[d]);
    for (std::size_t r = 0; r < volume; ++r) rows[r * vars.size() + d] = col[r];
  }
  return rows;
}

}  // namespace

std::vector<SampleRecord> sample_uips(const HypercubeBlock& block, std::size_t n,
                                      std::size_t bins_per_dim,
                                      const std::vector<std::string>& feature_vars,
                                      std::uint64_t seed) {
  const auto rows = feature_rows(block, feature_vars);
  Rng rng(seed);
  return make_records(
      block, select_uips(PointMatrix{rows, feature_vars.size()}, n, bins_per_dim, rng));
}

std::vector<SampleRecord> sample_maxent_points(const HypercubeBlock& block,
                                               const std::string& cluster_var,
                                               std::size_t num_clusters,
                                               std::size_t n, std::uint64_t seed) {
  MaxentPointOptions opt;
  opt.num_clusters = num_clusters;
  return make_records(block, select_maxent_points(block.values_of(cluster_var), n,
                                                  opt, seed));
}

std::vector<std::size_t> sample_block(const HypercubeBlock& block,
                                      const PointSamplerParams& p,
                                      std::uint64_t seed) {
  Rng rng(seed);
  switch (p.method) {
    case PointMethod::full:
      return select_full(block.volume());
    case PointMethod::random:
      return select_random(block.volume(), p.num_samples, rng);
    case PointMethod::stratified:
      return select_stratified(block.desc.extents, p.num_samples, p.strata, rng);
    case PointMethod::lhs:
      return select_lhs(block.desc.extents, p.num_samples, rng);
    case PointMethod::uips: {
      const auto rows = feature_rows(block, p.uips_vars);
      return select_uips(PointMatrix{rows, p.uips_vars.size()}, p.num_samples,
                         p.bins, rng);
    }
    case PointMethod::maxent: {
      MaxentPointOptions opt;
      opt.num_clusters = p.num_clusters;
      opt.bins = p.bins;
      return select_maxent_points(block.values_of(p.cluster_var), p.num_samples,
                                  opt, seed);
    }
  }
  throw std::logic_error("unhandled point method");
}

}  // namespace curator
