#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "curator/samplers.hpp"
#include "curator/synthetic.hpp"
#include "test_util.hpp"

using namespace curator;
using curator::testing::ramp_dataset;
using curator::testing::WarningLog;

namespace {

HypercubeBlock ramp_block(std::size_t e) {
  static const GridDataset ds = ramp_dataset(64, 64, 64);
  return extract_block(ds, BlockDescriptor{{0, 0, 0}, {e, e, e}, 0});
}

HypercubeBlock scalar_block(const std::string& kind, std::size_t e,
                            const std::map<std::string, double>& params, std::uint64_t seed) {
  const auto ds = gen_scalar_field(kind, GridDims{e, e, e, 1, 3}, params, seed);
  return extract_block(ds, BlockDescriptor{{0, 0, 0}, {e, e, e}, 0});
}

bool distinct_sorted(const std::vector<std::size_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) return false;
  return true;
}

void expect_faithful(const HypercubeBlock& block, const std::vector<SampleRecord>& recs) {
  std::set<Index3> seen;
  for (const auto& r : recs) {
    for (int a = 0; a < 3; ++a) {
      ASSERT_GE(r.index[a], block.desc.origin[a]);
      ASSERT_LT(r.index[a], block.desc.origin[a] + block.desc.extents[a]);
    }
    EXPECT_TRUE(seen.insert(r.index).second);
    ASSERT_EQ(r.values.size(), block.variables.size());
    const std::size_t local =
        ((r.index[2] - block.desc.origin[2]) * block.desc.extents[1] +
         (r.index[1] - block.desc.origin[1])) * block.desc.extents[0] +
        (r.index[0] - block.desc.origin[0]);
    for (std::size_t v = 0; v < block.variables.size(); ++v) {
      EXPECT_EQ(r.values[v], block.values[v][local]);
    }
  }
}

double cv_of_counts(const std::vector<double>& values, const std::vector<double>& ref,
                    std::size_t bins) {
  auto [mn, mx] = std::minmax_element(ref.begin(), ref.end());
  auto bin = [&](double v) {
    return std::min(bins - 1, static_cast<std::size_t>((v - *mn) / (*mx - *mn) * bins));
  };
  std::vector<double> occupied(bins, 0), counts(bins, 0);
  for (double v : ref) occupied[bin(v)] = 1;
  for (double v : values) counts[bin(v)] += 1;
  std::vector<double> c;
  for (std::size_t b = 0; b < bins; ++b)
    if (occupied[b] > 0) c.push_back(counts[b]);
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / c.size();
  double ss = 0;
  for (double x : c) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / c.size()) / mean;
}

}  // namespace

TEST(Full, EveryPointInOrder) {
  const auto block = ramp_block(32);
  const auto recs = sample_full(block);
  EXPECT_EQ(recs.size(), 32768u);
  expect_faithful(block, recs);
  const auto small = sample_full(ramp_block(2));
  ASSERT_EQ(small.size(), 8u);
  const std::vector<double> want{0, 1, 1, 2, 1, 2, 2, 3};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(small[i].values[0], want[i]);
  EXPECT_EQ(select_full(5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Random, CountsAndDistinctness) {
  const auto block = ramp_block(32);
  const auto recs = sample_random(block, 3277, 1);
  EXPECT_EQ(recs.size(), 3277u);
  expect_faithful(block, recs);
  EXPECT_EQ(sample_random(block, 32768, 2).size(), 32768u);
  EXPECT_THROW(sample_random(block, 32769, 2), std::invalid_argument);
}

TEST(Random, InclusionFrequencyUniform) {
  const std::size_t volume = 64, n = 16, trials = 1000;
  std::vector<double> hits(volume, 0);
  for (std::uint64_t s = 0; s < trials; ++s) {
    Rng rng(mix_seed({s, 99}));
    for (auto i : select_random(volume, n, rng)) hits[i] += 1;
  }
  const double p = double(n) / volume;
  const double sigma = std::sqrt(trials * p * (1 - p));
  std::size_t outside = 0;
  for (double h : hits) outside += std::abs(h - trials * p) > 3 * sigma;
  EXPECT_LE(outside, 2u);
}

TEST(Stratified, OnePerStratumAndContainment) {
  const auto block = ramp_block(16);
  const Extents3 strata{4, 4, 2};
  Rng rng(3);
  const auto idx = select_stratified(block.desc.extents, 32, strata, rng);
  ASSERT_EQ(idx.size(), 32u);
  std::vector<int> per(32, 0);
  for (auto l : idx) {
    const std::size_t i = l % 16, j = (l / 16) % 16, k = l / 256;
    ++per[(k / 8) * 16 + (j / 4) * 4 + i / 4];
  }
  for (int c : per) EXPECT_EQ(c, 1);
}

TEST(Stratified, EqualCountsAndBounds) {
  const Extents3 ext{12, 10, 9};
  const Extents3 strata{3, 2, 3};
  Rng rng(4);
  const auto idx = select_stratified({12, 12, 12}, 18 * 7, strata, rng);
  EXPECT_EQ(idx.size(), 126u);
  std::vector<int> per(18, 0);
  for (auto l : idx) {
    const std::size_t i = l % 12, j = (l / 12) % 12, k = l / 144;
    ++per[(k / 4) * 6 + (j / 6) * 3 + i / 4];
  }
  for (int c : per) EXPECT_EQ(c, 7);
  EXPECT_TRUE(distinct_sorted(idx));

  // Uneven extents: every index lies in the stratum bounds it was drawn for.
  for (std::size_t s = 0; s < 3; ++s) {
    const auto b = stratum_bounds(10, 3, s);
    EXPECT_LT(b[0], b[1]);
  }
  EXPECT_EQ(stratum_bounds(10, 3, 0)[0], 0u);
  EXPECT_EQ(stratum_bounds(10, 3, 2)[1], 10u);
  Rng r2(5);
  const auto uneven = select_stratified(ext, 40, strata, r2);
  EXPECT_EQ(uneven.size(), 40u);
  EXPECT_TRUE(distinct_sorted(uneven));
  EXPECT_THROW(select_stratified(ext, 17, strata, r2), std::invalid_argument);
}

TEST(Lhs, LatinProperty) {
  Rng rng(6);
  for (std::size_t n : {1u, 7u, 100u}) {
    const auto pts = latin_hypercube(n, rng);
    ASSERT_EQ(pts.size(), n);
    for (int a = 0; a < 3; ++a) {
      std::vector<int> seen(n, 0);
      for (const auto& p : pts) {
        ASSERT_GE(p[a], 0.0);
        ASSERT_LT(p[a], 1.0);
        ++seen[static_cast<std::size_t>(p[a] * n)];
      }
      for (int c : seen) EXPECT_EQ(c, 1);
    }
  }
}

TEST(Lhs, SnappedPointsDistinct) {
  const auto block = ramp_block(8);
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (std::size_t n : {1u, 50u, 400u, 512u}) {
      const auto recs = sample_lhs(block, n, s);
      EXPECT_EQ(recs.size(), n);
      expect_faithful(block, recs);
    }
  }
  EXPECT_THROW(sample_lhs(block, 513, 0), std::invalid_argument);
}

TEST(Uips, ExactCountAndFaithful) {
  const auto block = scalar_block("bimodal", 16, {{"weight1", 0.9}, {"mean1", -5},
                                                  {"mean2", 5}, {"sigma", 0.5}}, 3);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto recs = sample_uips(block, 410, 20, {"q"}, s);
    EXPECT_EQ(recs.size(), 410u);
    expect_faithful(block, recs);
  }
  EXPECT_THROW(sample_uips(block, 4097, 20, {"q"}, 0), std::invalid_argument);
}

TEST(Uips, FlattensBimodal) {
  int wins = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto block = scalar_block("bimodal", 32, {{"weight1", 0.9}, {"mean1", -5},
                                                    {"mean2", 5}, {"sigma", 0.5}}, 50 + s);
    const auto full = block.values_of("q");
    const std::vector<double> ref(full.begin(), full.end());
    auto values = [](const std::vector<SampleRecord>& r) {
      std::vector<double> v;
      for (const auto& x : r) v.push_back(x.values[0]);
      return v;
    };
    const double u = cv_of_counts(values(sample_uips(block, 3277, 100, {"q"}, s)), ref, 100);
    const double r = cv_of_counts(values(sample_random(block, 3277, s)), ref, 100);
    wins += u < r;
  }
  EXPECT_GE(wins, 18);
}

TEST(Uips, UniformDataBehavesLikeRandom) {
  Rng gen(1);
  std::vector<double> x(20000);
  for (auto& v : x) v = gen.uniform();
  UipsDiagnostics diag;
  Rng rng(2);
  const auto idx = select_uips({x, 1}, 2000, 10, rng, &diag);
  EXPECT_EQ(idx.size(), 2000u);
  EXPECT_FALSE(diag.fell_back_to_random);
  EXPECT_LE(diag.bisection_iterations, 30);
  EXPECT_NEAR(double(diag.accepted_before_adjust), 2000.0, 200.0);
}

TEST(Uips, ConstantFeatureFallsBack) {
  WarningLog log;
  std::vector<double> x(100, 3.0);
  UipsDiagnostics diag;
  Rng rng(1);
  EXPECT_EQ(select_uips({x, 1}, 10, 5, rng, &diag).size(), 10u);
  EXPECT_TRUE(diag.fell_back_to_random);
  EXPECT_TRUE(log.contains("constant"));
}

TEST(Maxent, ExactCountDistinct) {
  const auto block = scalar_block("lognormal", 32, {}, 4);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto recs = sample_maxent_points(block, "q", 20, 3277, s);
    EXPECT_EQ(recs.size(), 3277u);
    expect_faithful(block, recs);
  }
  EXPECT_THROW(sample_maxent_points(block, "q", 20, 40000, 0), std::invalid_argument);
}

TEST(Maxent, ConstantFieldBehavesLikeRandom) {
  WarningLog log;
  std::vector<double> v(1000, 2.5);
  const auto idx = select_maxent_points(v, 100, {}, 3);
  EXPECT_EQ(idx.size(), 100u);
  EXPECT_TRUE(distinct_sorted(idx));
  EXPECT_FALSE(log.messages.empty());
}

TEST(Maxent, FewDistinctValuesReducesK) {
  WarningLog log;
  std::vector<double> v;
  for (int i = 0; i < 300; ++i) v.push_back(i % 3);
  const auto idx = select_maxent_points(v, 30, {20, 100}, 1);
  EXPECT_EQ(idx.size(), 30u);
  EXPECT_TRUE(log.contains("3"));
}

TEST(Maxent, TailOccupancyAtLeastRandomOnAverage) {
  double maxent_occ = 0, random_occ = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto block = scalar_block("lognormal", 32, {}, 200 + s);
    const auto full = block.values_of("q");
    auto [mn, mx] = std::minmax_element(full.begin(), full.end());
    auto occ = [&](const std::vector<SampleRecord>& recs) {
      std::vector<bool> hit(100, false);
      for (const auto& r : recs)
        hit[std::min<std::size_t>(99, (r.values[0] - *mn) / (*mx - *mn) * 100)] = true;
      return std::count(hit.begin(), hit.end(), true) / 100.0;
    };
    maxent_occ += occ(sample_maxent_points(block, "q", 20, 3277, s));
    random_occ += occ(sample_random(block, 3277, s));
  }
  EXPECT_GE(maxent_occ, random_occ);
}

TEST(Dispatch, SampleBlockRoutesByMethod) {
  const auto block = ramp_block(8);
  PointSamplerParams p;
  p.num_samples = 50;
  p.cluster_var = "f";
  p.uips_vars = {"f"};
  p.strata = {2, 2, 2};
  for (auto m : {PointMethod::random, PointMethod::stratified, PointMethod::lhs,
                 PointMethod::uips, PointMethod::maxent}) {
    p.method = m;
    const auto idx = sample_block(block, p, 9);
    EXPECT_EQ(idx.size(), 50u) << to_string(m);
    EXPECT_TRUE(distinct_sorted(idx));
    EXPECT_EQ(idx, sample_block(block, p, 9));
  }
  p.method = PointMethod::full;
  EXPECT_EQ(sample_block(block, p, 1).size(), 512u);
  EXPECT_EQ(sample_block(block, p, 1), sample_block(block, p, 2));
}

TEST(Records, NormalizedCoordinates) {
  const auto ds = ramp_dataset(5, 3, 1, 2);
  const auto block = extract_block(ds, BlockDescriptor{{0, 0, 0}, {5, 3, 1}, 1});
  const std::vector<std::size_t> idx{0, 14};
  const auto recs = make_records(block, idx);
  EXPECT_EQ(recs[1].index, (Index3{4, 2, 0}));
  EXPECT_DOUBLE_EQ(recs[1].coords[0], 1.0);
  EXPECT_DOUBLE_EQ(recs[1].coords[1], 1.0);
  EXPECT_DOUBLE_EQ(recs[1].coords[2], 0.0);
  EXPECT_DOUBLE_EQ(recs[1].coords[3], 1.0);
  EXPECT_EQ(recs[1].timestep, 1u);
}
