#include <gtest/gtest.h>

#include <cstdlib>

#include "curator/error.hpp"
#include "curator/pipeline.hpp"
#include "curator/sample_io.hpp"
#include "curator/synthetic.hpp"
#include "test_util.hpp"

using namespace curator;
using curator::testing::TempDir;

namespace {

RunConfig config_for(const GridDataset& ds, CubeMethod cubes, PointMethod method,
                     std::size_t m, std::size_t n, std::size_t edge) {
  RunConfig cfg;
  cfg.dataset.nx = ds.dims().nx;
  cfg.dataset.ny = ds.dims().ny;
  cfg.dataset.nz = ds.dims().nz;
  cfg.dataset.dims = ds.dims().dims;
  cfg.dataset.roles = ds.roles();
  cfg.has_subsample = true;
  cfg.sampling.hypercubes = cubes;
  cfg.sampling.method = method;
  cfg.sampling.num_hypercubes = m;
  cfg.sampling.num_samples = n;
  cfg.sampling.cube = {edge, edge, ds.dims().dims == 2 ? 1 : edge};
  cfg.sampling.seed = 5;
  return cfg;
}

const GridDataset& tg64() {
  static const GridDataset ds = gen_taylor_green(GridDims{64, 64, 64, 2, 3}, 0.0);
  return ds;
}

}  // namespace

TEST(Pipeline, FullMethodCount) {
  const auto cfg = config_for(tg64(), CubeMethod::random, PointMethod::full, 2, 0, 32);
  const auto out = run_pipeline(cfg, tg64());
  EXPECT_EQ(out.records.size(), 2u * 2u * 32768u);
  EXPECT_EQ(out.provenance.cubes.size(), 4u);
  EXPECT_EQ(out.variables, (std::vector<std::string>{"u", "v", "w", "wz"}));
}

TEST(Pipeline, RecordsMatchDatasetExactly) {
  for (auto m : {PointMethod::random, PointMethod::stratified, PointMethod::lhs,
                 PointMethod::uips, PointMethod::maxent}) {
    auto cfg = config_for(tg64(), CubeMethod::maxent, m, 3, 3277, 32);
    cfg.sampling.uips_vars = {"u", "v"};
    const auto out = run_pipeline(cfg, tg64());
    ASSERT_EQ(out.records.size(), 2u * 3u * 3277u) << to_string(m);
    for (std::size_t r = 0; r < out.records.size(); r += 37) {
      const auto& rec = out.records[r];
      for (std::size_t v = 0; v < out.variables.size(); ++v) {
        ASSERT_EQ(rec.values[v], tg64().at(out.variables[v], rec.timestep, rec.index[0],
                                           rec.index[1], rec.index[2]));
      }
    }
    for (const auto& c : out.provenance.cubes) {
      for (std::size_t r = c.first_record; r < c.first_record + c.record_count; ++r) {
        for (int a = 0; a < 3; ++a) {
          ASSERT_GE(out.records[r].index[a], c.block.origin[a]);
          ASSERT_LT(out.records[r].index[a], c.block.origin[a] + c.block.extents[a]);
        }
      }
    }
  }
}

TEST(Pipeline, DeterministicAndWorkerInvariant) {
  const auto cfg = config_for(tg64(), CubeMethod::maxent, PointMethod::maxent, 4, 500, 16);
  const auto a = run_pipeline(cfg, tg64(), {1, {}});
  const auto b = run_pipeline(cfg, tg64(), {1, {}});
  const auto c = run_pipeline(cfg, tg64(), {8, {}});
  EXPECT_TRUE(same_samples(a, b));
  EXPECT_TRUE(same_samples(a, c));
  EXPECT_EQ(samples_to_csv(a), samples_to_csv(c));
  auto other = cfg;
  other.sampling.seed = 6;
  EXPECT_FALSE(same_samples(a, run_pipeline(other, tg64())));
}

TEST(Pipeline, CubeSeedIsOrderFree) {
  EXPECT_EQ(cube_seed(1, 2, 3), cube_seed(1, 2, 3));
  EXPECT_NE(cube_seed(1, 2, 3), cube_seed(1, 3, 2));
  EXPECT_NE(cube_seed(1, 2, 3), cube_seed(2, 2, 3));
}

TEST(Pipeline, TooManyCubesIsConfigError) {
  const auto cfg = config_for(tg64(), CubeMethod::random, PointMethod::random, 9, 10, 32);
  EXPECT_THROW(run_pipeline(cfg, tg64()), ConfigError);
}

TEST(Pipeline, EnvironmentSeedFallback) {
  auto cfg = config_for(tg64(), CubeMethod::random, PointMethod::random, 1, 10, 32);
  cfg.sampling.seed.reset();
  setenv("CURATOR_SEED", "1234", 1);
  EXPECT_EQ(effective_seed(cfg), 1234u);
  unsetenv("CURATOR_SEED");
  cfg.sampling.seed = 9;
  EXPECT_EQ(effective_seed(cfg), 9u);
}

TEST(Pipeline, ProductionShapeRecordCount) {
  // 512 x 512 x 256 grid, 32 cubes of 32^3, 3277 points each.
  const auto ds = gen_scalar_field("lognormal", GridDims{512, 512, 256, 1, 3}, {}, 1);
  auto cfg = config_for(ds, CubeMethod::maxent, PointMethod::maxent, 32, 3277, 32);
  const auto out = run_pipeline(cfg, ds, {0, {}});
  EXPECT_EQ(out.records.size(), 104864u);
  EXPECT_EQ(out.provenance.cubes.size(), 32u);
}

TEST(SampleIo, CsvRoundTripAndProvenance) {
  TempDir tmp;
  const auto cfg = config_for(tg64(), CubeMethod::random, PointMethod::random, 2, 100, 32);
  const auto out = run_pipeline(cfg, tg64());
  write_samples_csv(out, tmp / "s.csv");
  const auto back = read_samples_csv(tmp / "s.csv", 2);
  EXPECT_TRUE(same_samples(out, back));
  EXPECT_EQ(curator::testing::read_file(tmp / "s.csv"), samples_to_csv(out));

  const auto json = provenance_to_json(out.provenance);
  EXPECT_EQ(provenance_from_json(json), out.provenance);
  write_sidecar(out, tmp / "s.json");
  const auto text = curator::testing::read_file(tmp / "s.json");
  EXPECT_NE(text.find("created"), std::string::npos);

  write_samples_binary(out, tmp / "s.bin");
  EXPECT_EQ(std::filesystem::file_size(tmp / "s.bin"),
            out.records.size() * (7 + out.variables.size()) * 8);
}
