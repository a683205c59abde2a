#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "curator/entropy.hpp"
#include "test_util.hpp"

using namespace curator;
using curator::testing::WarningLog;

namespace {

// Direct summation in long double, written independently of the library.
double oracle_kl(const std::vector<double>& p, const std::vector<double>& q, double eps) {
  const long double k = static_cast<long double>(p.size());
  long double sum = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double a = (p[i] + static_cast<long double>(eps)) / (1.0L + k * eps);
    const long double b = (q[i] + static_cast<long double>(eps)) / (1.0L + k * eps);
    sum += a * std::log(a / b);
  }
  return static_cast<double>(std::max(sum, 0.0L));
}

std::vector<double> random_dist(std::mt19937_64& gen, std::size_t k, bool sparse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(k);
  for (auto& v : p) v = (sparse && u(gen) < 0.3) ? 0.0 : u(gen);
  if (std::accumulate(p.begin(), p.end(), 0.0) == 0.0) p[0] = 1.0;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  return p;
}

}  // namespace

TEST(Kl, HandValues) {
  const double a = kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75});
  EXPECT_NEAR(a, 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-9);
  EXPECT_NEAR(a, 0.14384, 1e-5);
  const double b = kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(b, std::log(2.0), 1e-6);
}

TEST(Kl, IdenticalIsZero) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    auto p = random_dist(gen, 1 + t, t % 2 == 0);
    EXPECT_NEAR(kl_divergence(p, p), 0.0, 1e-9);
  }
}

TEST(Kl, MatchesOracleOnRandomPairs) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = 1 + gen() % 100;
    auto p = random_dist(gen, k, t % 3 == 0);
    auto q = random_dist(gen, k, t % 5 == 0);
    const double got = kl_divergence(p, q);
    const double want = oracle_kl(p, q, kDefaultEpsilon);
    EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, std::abs(want))) << "k=" << k;
  }
}

TEST(Kl, NonNegativeAndAsymmetryWitnessed) {
  std::mt19937_64 gen(3);
  bool asymmetric = false;
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + gen() % 20;
    auto p = random_dist(gen, k, true);
    auto q = random_dist(gen, k, true);
    const double pq = kl_divergence(p, q);
    const double qp = kl_divergence(q, p);
    EXPECT_GE(pq, 0.0);
    EXPECT_GE(qp, 0.0);
    if (p != q) EXPECT_GT(pq, 0.0);
    asymmetric |= std::abs(pq - qp) > 1e-6;
  }
  EXPECT_TRUE(asymmetric);
}

TEST(Kl, LengthMismatchThrows) {
  EXPECT_THROW(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}),
               std::invalid_argument);
}

TEST(ClusterDistribution, FromCountsAndValidate) {
  auto d = ClusterDistribution::from_counts(std::vector<double>{3, 1});
  EXPECT_DOUBLE_EQ(d.p[0], 0.75);
  EXPECT_DOUBLE_EQ(d.p[1], 0.25);
  EXPECT_THROW(ClusterDistribution::from_counts(std::vector<double>{0, 0}),
               std::invalid_argument);
  EXPECT_THROW((ClusterDistribution{{0.5, 0.6}}.validate()), std::invalid_argument);
  EXPECT_THROW((ClusterDistribution{{1.5, -0.5}}.validate()), std::invalid_argument);
}

TEST(Adjacency, TwoDistributionsHandValue) {
  std::vector<ClusterDistribution> d{{{0.75, 0.25}}, {{0.25, 0.75}}};
  const auto g = adjacency_matrix(d);
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(1, 1), 0.0);
  EXPECT_NEAR(g.at(0, 1), 0.5 * std::log(3.0), 1e-9);
  EXPECT_NEAR(g.at(1, 0), 0.54931, 1e-5);
  EXPECT_NEAR(g.strengths[0], 0.54931, 1e-5);
  EXPECT_NEAR(g.strengths[1], 0.54931, 1e-5);
}

TEST(Adjacency, IdenticalGivesZeroMatrix) {
  std::vector<ClusterDistribution> d(5, ClusterDistribution{{0.2, 0.3, 0.5}});
  const auto g = adjacency_matrix(d);
  for (double a : g.adjacency) EXPECT_EQ(a, 0.0);
  for (double s : g.strengths) EXPECT_EQ(s, 0.0);
}

TEST(Adjacency, MatchesPairwiseCallsBitwise) {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + gen() % 20;
    const std::size_t k = 1 + gen() % 30;
    std::vector<ClusterDistribution> d;
    for (std::size_t i = 0; i < n; ++i) d.push_back({random_dist(gen, k, true)});
    const auto g = adjacency_matrix(d);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double want = i == j ? 0.0 : kl_divergence(d[i], d[j]);
        EXPECT_EQ(g.at(i, j), want);
        row += g.at(i, j);
      }
      EXPECT_EQ(g.strengths[i], row);
    }
  }
}

TEST(Adjacency, InconsistentLengthsThrow) {
  std::vector<ClusterDistribution> d{{{1.0}}, {{0.5, 0.5}}};
  EXPECT_THROW(adjacency_matrix(d), std::invalid_argument);
}

TEST(WeightedSample, OneHot) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_EQ(weighted_sample(std::vector<double>{0, 0, 5, 0}, 1, s, false),
              (std::vector<std::size_t>{2}));
  }
}

TEST(WeightedSample, ExhaustionIsPermutation) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto out = weighted_sample(std::vector<double>{1, 1, 1, 1}, 4, s, false);
    std::sort(out.begin(), out.end());
    EXPECT_EQ(out, (std::vector<std::size_t>{0, 1, 2, 3}));
  }
}

TEST(WeightedSample, FrequenciesWithReplacement) {
  const auto out = weighted_sample(std::vector<double>{1, 2, 3}, 30000, 5, true);
  std::array<double, 3> freq{};
  for (auto i : out) freq[i] += 1.0 / 30000.0;
  EXPECT_NEAR(freq[0], 1.0 / 6, 0.01);
  EXPECT_NEAR(freq[1], 2.0 / 6, 0.01);
  EXPECT_NEAR(freq[2], 3.0 / 6, 0.01);
}

TEST(WeightedSample, FirstDrawOrderingFollowsWeights) {
  const std::vector<double> w{1, 4, 2, 8};
  std::array<int, 4> first{};
  for (std::uint64_t s = 0; s < 10000; ++s) ++first[weighted_sample(w, 2, s, false)[0]];
  EXPECT_LT(first[0], first[2]);
  EXPECT_LT(first[2], first[1]);
  EXPECT_LT(first[1], first[3]);
}

TEST(WeightedSample, ErrorsAndFallback) {
  EXPECT_THROW(weighted_sample(std::vector<double>{1, -1}, 1, 0, false), std::invalid_argument);
  EXPECT_THROW(weighted_sample(std::vector<double>{1, 1}, 3, 0, false), std::invalid_argument);
  WarningLog log;
  auto out = weighted_sample(std::vector<double>{0, 0, 0}, 3, 0, false);
  std::sort(out.begin(), out.end());
  EXPECT_EQ(out, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_FALSE(log.messages.empty());
}

TEST(WeightedSample, DeterministicAndSeedSensitive) {
  std::vector<double> w(50);
  std::iota(w.begin(), w.end(), 1.0);
  EXPECT_EQ(weighted_sample(w, 10, 7, false), weighted_sample(w, 10, 7, false));
  EXPECT_NE(weighted_sample(w, 10, 7, false), weighted_sample(w, 10, 8, false));
}

TEST(AllocateCounts, Examples) {
  EXPECT_EQ(allocate_counts(std::vector<double>{1, 1}, 10), (std::vector<std::size_t>{5, 5}));
  EXPECT_EQ(allocate_counts(std::vector<double>{3, 1}, 2), (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(allocate_counts(std::vector<double>{0, 0, 0}, 3),
            (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(allocate_counts(std::vector<double>{1, 2}, 0), (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(allocate_counts(std::vector<double>{1, 2}, -4), (std::vector<std::size_t>{0, 0}));
  // Equal remainders go to the lowest index.
  EXPECT_EQ(allocate_counts(std::vector<double>{1, 1, 1}, 4),
            (std::vector<std::size_t>{2, 1, 1}));
}

TEST(AllocateCounts, CapacitiesRedistribute) {
  const std::vector<std::size_t> cap{1, 10, 10};
  const auto out = allocate_counts(std::vector<double>{10, 1, 1}, 9, cap);
  EXPECT_EQ(out[0], 1u);
  EXPECT_EQ(out[0] + out[1] + out[2], 9u);
  EXPECT_LE(out[1], 10u);
  const std::vector<std::size_t> tiny{1, 1};
  EXPECT_THROW(allocate_counts(std::vector<double>{1, 1}, 3, tiny), std::invalid_argument);
}

TEST(AllocateCounts, ConservesTotal) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + gen() % 25;
    std::vector<double> s(k);
    for (auto& v : s) v = gen() % 4 == 0 ? 0.0 : u(gen);
    const long long n = static_cast<long long>(gen() % 5000);
    std::vector<std::size_t> cap(k);
    std::size_t total_cap = 0;
    for (auto& c : cap) total_cap += (c = 1 + gen() % 500);
    const auto free = allocate_counts(s, n);
    EXPECT_EQ(std::accumulate(free.begin(), free.end(), 0ull), static_cast<unsigned long long>(n));
    if (static_cast<std::size_t>(n) <= total_cap) {
      const auto capped = allocate_counts(s, n, cap);
      EXPECT_EQ(std::accumulate(capped.begin(), capped.end(), 0ull),
                static_cast<unsigned long long>(n));
      for (std::size_t i = 0; i < k; ++i) EXPECT_LE(capped[i], cap[i]);
    }
  }
}
