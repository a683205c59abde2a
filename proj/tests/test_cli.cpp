#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "curator/cli.hpp"
#include "test_util.hpp"

using namespace curator;
using curator::testing::read_file;
using curator::testing::TempDir;
using curator::testing::write_file;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const fs::path& file) {
  const auto text = read_file(file);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Generates a dataset under dir/data and returns the ready-made config path.
fs::path generate(const TempDir& tmp, const std::string& body) {
  write_file(tmp / "gen.yaml", body);
  const auto r = run({"generate", (tmp / "gen.yaml").string(), "--output-dir",
                      (tmp / "data").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  return tmp / "data" / "config.yaml";
}

const char* kTaylorGreen64 =
    "shared:\n  nx: 64\n  ny: 64\n  nz: 64\n  input_vars: [u, v, w]\n"
    "  output_vars: [wz]\n  cluster_var: wz\n"
    "generate:\n  kind: taylor_green\n";

const char* kLognormal32 =
    "shared:\n  nx: 32\n  ny: 32\n  nz: 32\n  input_vars: [q]\n  cluster_var: q\n"
    "generate:\n  kind: lognormal_field\n  seed: 7\n";

std::string production_shaped(const fs::path& data) {
  return "shared:\n  dims: 3\n  dtype: sst-binary\n  input_vars: [u, v, w]\n"
         "  output_vars: [wz]\n  cluster_var: wz\n  nx: 64\n  ny: 64\n  nz: 64\n"
         "  gravity: z\n"
         "subsample:\n  hypercubes: maxent\n  num_hypercubes: 4\n  method: maxent\n"
         "  path: " + data.string() + "\n  num_samples: 3277\n  num_clusters: 20\n"
         "  nxsl: 32\n  nysl: 32\n  nzsl: 32\n  uips_vars: [u, v]\n"
         "train:\n  epochs: 1000\n  window: 1\n";
}

}  // namespace

TEST(Cli, GenerateTaylorGreenFiles) {
  TempDir tmp;
  const auto cfg = generate(tmp, kTaylorGreen64);
  for (const auto* v : {"u", "v", "w", "wz"}) {
    EXPECT_EQ(fs::file_size(tmp / "data" / (std::string(v) + "_0.bin")), 64u * 64 * 64 * 8);
  }
  EXPECT_TRUE(fs::exists(cfg));
}

TEST(Cli, GenerateIsDeterministic) {
  TempDir a, b;
  generate(a, kLognormal32);
  generate(b, kLognormal32);
  EXPECT_EQ(read_file(a / "data" / "q_0.bin"), read_file(b / "data" / "q_0.bin"));
}

TEST(Cli, GenerateUnknownKind) {
  TempDir tmp;
  write_file(tmp / "gen.yaml",
             "shared:\n  nx: 8\n  ny: 8\n  nz: 8\n  input_vars: [q]\n  cluster_var: q\n"
             "generate:\n  kind: sunspots\n");
  const auto r = run({"generate", (tmp / "gen.yaml").string(), "--output-dir",
                      (tmp / "d").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("sunspots"), std::string::npos);
}

TEST(Cli, SubsampleProductionShape) {
  TempDir tmp;
  generate(tmp, kTaylorGreen64);
  write_file(tmp / "case.yaml", production_shaped(tmp / "data"));
  const auto r = run({"subsample", (tmp / "case.yaml").string(), "--output-dir",
                      (tmp / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = tmp / "out" / "SST-P1-Hmaxent-C4-Xmaxent-ns3277-window1.csv";
  EXPECT_EQ(lines(csv), 1u + 4u * 3277u);
  EXPECT_TRUE(fs::exists(tmp / "out" / "SST-P1-Hmaxent-C4-Xmaxent-ns3277-window1.json"));
  EXPECT_NE(r.out.find("Total Cost Proxy"), std::string::npos);
  EXPECT_NE(r.out.find("proxy units"), std::string::npos);

  const auto full = run({"subsample", (tmp / "case.yaml").string(), "--output-dir",
                         (tmp / "full").string(), "--method", "full"});
  ASSERT_EQ(full.code, 0) << full.err;
  EXPECT_EQ(lines(tmp / "full" / "SST-P1-Hmaxent-C4-Xfull-ns3277-window1.csv"),
            1u + 4u * 32768u);
}

TEST(Cli, SubsampleIsByteStable) {
  TempDir tmp;
  generate(tmp, kTaylorGreen64);
  write_file(tmp / "case.yaml", production_shaped(tmp / "data"));
  for (const auto* dir : {"a", "b"}) {
    ASSERT_EQ(run({"subsample", (tmp / "case.yaml").string(), "--output-dir",
                   (tmp / dir).string(), "--seed", "11", "--workers", "3"})
                  .code,
              0);
  }
  const std::string name = "SST-P1-Hmaxent-C4-Xmaxent-ns3277-window1.csv";
  EXPECT_EQ(read_file(tmp / "a" / name), read_file(tmp / "b" / name));
}

TEST(Cli, MissingDatasetPath) {
  TempDir tmp;
  write_file(tmp / "case.yaml", production_shaped("/no/such/curator/dir"));
  const auto r = run({"subsample", (tmp / "case.yaml").string(), "--output-dir",
                      (tmp / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/no/such/curator/dir"), std::string::npos) << r.err;
}

TEST(Cli, MissingConfigAndBadFlags) {
  EXPECT_EQ(run({"subsample", "/no/such/config.yaml"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, CompareOutputs) {
  TempDir tmp;
  generate(tmp, kTaylorGreen64);
  write_file(tmp / "case.yaml", production_shaped(tmp / "data"));
  const auto r = run({"compare", (tmp / "case.yaml").string(), "--output-dir",
                      (tmp / "cmp").string(), "--methods", "random,maxent,uips", "--seeds",
                      "1,2,3", "--num-samples", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  // 9 runs x 4 variables, plus mean and std per method and variable.
  EXPECT_EQ(lines(tmp / "cmp" / "comparison.csv"), 1u + 9u * 4u + 3u * 2u * 4u);
  for (const auto* m : {"random", "maxent", "uips"}) {
    EXPECT_EQ(lines(tmp / "cmp" / (std::string("histogram_") + m + ".csv")), 101u);
  }
  const auto bad = run({"compare", (tmp / "case.yaml").string(), "--output-dir",
                        (tmp / "bad").string(), "--methods", "random,bogus"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("stratified"), std::string::npos) << bad.err;
}

TEST(Cli, BenchSingleWorkerAndGate) {
  TempDir tmp;
  generate(tmp, kTaylorGreen64);
  write_file(tmp / "case.yaml", production_shaped(tmp / "data") + "bench:\n  repeats: 1\n");
  const auto r = run({"bench", (tmp / "case.yaml").string(), "--output-dir",
                      (tmp / "b").string(), "--workers", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_file(tmp / "b" / "scaling.csv");
  EXPECT_EQ(lines(tmp / "b" / "scaling.csv"), 2u);
  EXPECT_NE(csv.find("\n1,"), std::string::npos);
  EXPECT_NE(csv.find(",1,1\n"), std::string::npos) << csv;
  EXPECT_TRUE(fs::exists(tmp / "b" / "knee.json"));

  const auto bad = run({"bench", (tmp / "case.yaml").string(), "--output-dir",
                        (tmp / "c").string(), "--workers", "2", "--inject-mismatch", "2"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_FALSE(fs::exists(tmp / "c" / "scaling.csv"));
}

TEST(Cli, InfoIsDryRun) {
  TempDir tmp;
  write_file(tmp / "case.yaml",
             "shared:\n  nx: 512\n  ny: 512\n  nz: 256\n  input_vars: [u]\n  cluster_var: u\n"
             "  timesteps: [0]\n"
             "subsample:\n  num_hypercubes: 32\n  num_samples: 3277\n  method: full\n"
             "  nxsl: 32\n  nysl: 32\n  nzsl: 32\n");
  const auto r = run({"info", (tmp / "case.yaml").string(), "--output-dir",
                      (tmp / "never").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2048 hypercubes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Expected rows: " + std::to_string(32u * 32768u)), std::string::npos)
      << r.out;
  EXPECT_FALSE(fs::exists(tmp / "never"));
}

TEST(Cli, BinaryExitCodes) {
  TempDir tmp;
  const std::string bin = CURATOR_BIN;
  const int ok = std::system((bin + " --help > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int bad = std::system((bin + " subsample /no/such.yaml 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 1);
}
