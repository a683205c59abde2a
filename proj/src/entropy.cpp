#include "curator/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "curator/log.hpp"

namespace curator {

ClusterDistribution ClusterDistribution::from_counts(
    std::span<const double> counts) {
  if (counts.empty()) throw std::invalid_argument("empty count vector");
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw std::invalid_argument("negative count");
    total += c;
  }
  if (total <= 0.0) throw std::invalid_argument("all counts are zero");
  ClusterDistribution d;
  d.p.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) d.p[i] = counts[i] / total;
  return d;
}

void ClusterDistribution::validate() const {
  if (p.empty()) throw std::invalid_argument("empty distribution");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
}

double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: length mismatch");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double norm = 1.0 + static_cast<double>(p.size()) * epsilon;
  double d = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double ps = (p[c] + epsilon) / norm;
    const double qs = (q[c] + epsilon) / norm;
    d += ps * std::log(ps / qs);
  }
  return d > 0.0 ? d : 0.0;
}

double kl_divergence(const ClusterDistribution& p, const ClusterDistribution& q,
                     double epsilon) {
  return kl_divergence(std::span<const double>(p.p),
                       std::span<const double>(q.p), epsilon);
}

EntropyGraph adjacency_matrix(std::span<const ClusterDistribution> dists,
                              double epsilon) {
  if (dists.empty()) throw std::invalid_argument("adjacency_matrix: no inputs");
  const std::size_t k = dists.front().size();
  for (const auto& d : dists) {
    if (d.size() != k) {
      throw std::invalid_argument("adjacency_matrix: inconsistent lengths");
    }
  }
  EntropyGraph g;
  g.n = dists.size();
  g.adjacency.assign(g.n * g.n, 0.0);
  g.strengths.assign(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
      if (i == j) continue;
      const double a = kl_divergence(dists[i], dists[j], epsilon);
      g.adjacency[i * g.n + j] = a;
      row += a;
    }
    g.strengths[i] = row;
  }
  return g;
}

namespace {

void check_weights(std::span<const double> weights) {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
  }
}

// Index whose cumulative weight first exceeds target; skips zero weights.
std::size_t pick(std::span<const double> w, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  std::size_t last_positive = w.size();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    acc += w[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;  // rounding at the top end
}

}  // namespace

std::vector<std::size_t> weighted_sample(std::span<const double> weights,
                                         std::size_t n, Rng& rng,
                                         bool with_replacement) {
  check_weights(weights);
  const std::size_t count = weights.size();
  if (count == 0) throw std::invalid_argument("weighted_sample: no weights");
  if (!with_replacement && n > count) {
    throw std::invalid_argument(
        "weighted_sample: n exceeds population without replacement");
  }

  std::vector<double> w(weights.begin(), weights.end());
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) {
    warn("all sampling weights are zero; falling back to uniform weights");
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(count);
  }

  std::vector<std::size_t> out;
  out.reserve(n);
  if (with_replacement) {
    // Cumulative table plus binary search.
    std::vector<double> cdf(count);
    std::partial_sum(w.begin(), w.end(), cdf.begin());
    for (std::size_t draw = 0; draw < n; ++draw) {
      const double target = rng.uniform() * cdf.back();
      auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      std::size_t idx = it == cdf.end() ? count - 1 : static_cast<std::size_t>(it - cdf.begin());
      while (w[idx] <= 0.0 && idx > 0) --idx;
      out.push_back(idx);
    }
    return out;
  }

  std::vector<bool> taken(count, false);
  for (std::size_t draw = 0; draw < n; ++draw) {
    total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) {
      // Only zero-weight indices remain: continue uniformly over them.
      for (std::size_t i = 0; i < count; ++i) w[i] = taken[i] ? 0.0 : 1.0;
      total = static_cast<double>(count - draw);
    }
    const std::size_t idx = pick(w, total, rng.uniform());
    out.push_back(idx);
    taken[idx] = true;
    w[idx] = 0.0;
  }
  return out;
}

std::vector<std::size_t> weighted_sample(std::span<const double> weights,
                                         std::size_t n, std::uint64_t seed,
                                         bool with_replacement) {
  Rng rng(seed);
  return weighted_sample(weights, n, rng, with_replacement);
}

namespace {

// Largest-remainder apportionment of `total` over `eligible` entries.
void apportion(std::span<const double> s, const std::vector<bool>& eligible,
               std::size_t total, std::vector<std::size_t>& out) {
  double sum = 0.0;
  std::size_t n_eligible = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (eligible[i]) {
      sum += s[i];
      ++n_eligible;
    }
  }
  if (n_eligible == 0 || total == 0) return;
  const bool uniform = sum <= 0.0;

  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!eligible[i]) continue;
    const double share = uniform ? 1.0 / static_cast<double>(n_eligible) : s[i] / sum;
    const double ideal = share * static_cast<double>(total);
    const auto whole = static_cast<std::size_t>(std::floor(ideal));
    out[i] += whole;
    assigned += whole;
    if (uniform || s[i] > 0.0) remainders.emplace_back(ideal - static_cast<double>(whole), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total && !remainders.empty(); ++r) {
    out[remainders[r % remainders.size()].second] += 1;
    ++assigned;
  }
}

}  // namespace

std::vector<std::size_t> allocate_counts(
    std::span<const double> strengths, long long n_total,
    std::optional<std::span<const std::size_t>> capacities) {
  check_weights(strengths);
  const std::size_t k = strengths.size();
  std::vector<std::size_t> counts(k, 0);
  if (n_total <= 0 || k == 0) return counts;
  auto total = static_cast<std::size_t>(n_total);

  if (!capacities) {
    apportion(strengths, std::vector<bool>(k, true), total, counts);
    return counts;
  }

  const auto& cap = *capacities;
  if (cap.size() != k) {
    throw std::invalid_argument("allocate_counts: capacity length mismatch");
  }
  const std::size_t room = std::accumulate(cap.begin(), cap.end(), std::size_t{0});
  if (room < total) {
    throw std::invalid_argument("allocate_counts: total exceeds capacity");
  }

  // Allocate, clip to capacity, and hand the overflow to entries that still
  // have room. Entries with positive strength are served first; zero-strength
  // entries only absorb what the positive ones cannot hold.
  std::size_t remaining = total;
  for (bool positive_only : {true, false}) {
    while (remaining > 0) {
      std::vector<bool> eligible(k, false);
      bool any = false;
      for (std::size_t i = 0; i < k; ++i) {
        const bool has_room = counts[i] < cap[i];
        const bool allowed = positive_only ? strengths[i] > 0.0 : true;
        eligible[i] = has_room && allowed;
        any = any || eligible[i];
      }
      if (!any) break;
      std::vector<std::size_t> add(k, 0);
      std::vector<double> s(strengths.begin(), strengths.end());
      if (!positive_only) {
        // Second pass is a uniform split over whatever still has room.
        std::fill(s.begin(), s.end(), 0.0);
      }
      apportion(s, eligible, remaining, add);
      std::size_t placed = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t take = std::min(add[i], cap[i] - counts[i]);
        counts[i] += take;
        placed += take;
      }
      remaining -= placed;
      if (placed == 0) break;
    }
    if (remaining == 0) break;
  }
  return counts;
}

}  // namespace curator
