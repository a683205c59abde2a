#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curator/grid.hpp"

namespace curator {

enum class PointMethod { full, random, stratified, lhs, uips, maxent };
enum class CubeMethod { maxent, random };

std::string_view to_string(PointMethod m);
std::string_view to_string(CubeMethod m);
// Throws ConfigError listing the valid names.
PointMethod parse_point_method(std::string_view name);
CubeMethod parse_cube_method(std::string_view name);
std::vector<std::string> point_method_names();

// `shared` section: where the data lives and what each variable does.
struct DatasetConfig {
  std::string dtype = "sst-binary";  // sst-binary | csv
  std::string path;
  int dims = 3;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 1;
  VariableRoles roles;
  std::string gravity = "z";
  std::optional<std::vector<long>> timesteps;  // nullopt means "all"
  Extents3 skip{1, 1, 1};
  int precision = 8;  // bytes per value in raw files: 4 or 8
  std::string fileprefix;

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

// `subsample` section.
struct SamplingConfig {
  CubeMethod hypercubes = CubeMethod::random;
  PointMethod method = PointMethod::maxent;
  std::size_t num_hypercubes = 1;
  std::size_t num_samples = 0;
  std::size_t num_clusters = 20;
  Extents3 cube{32, 32, 32};     // nxsl, nysl, nzsl
  Extents3 strata{4, 4, 4};      // stratified sub-grid
  std::size_t bins = 100;        // histogram bins (uips, maxent, metrics)
  std::vector<std::string> uips_vars;  // empty: input_vars (at most 4)
  std::optional<std::uint64_t> seed = 0;  // nullopt: unseeded
  std::size_t workers = 1;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

// `generate` section, consumed only by the generate command.
struct GenerateConfig {
  std::string kind;
  std::size_t nt = 1;
  double time = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;

  friend bool operator==(const GenerateConfig&, const GenerateConfig&) = default;
};

// `compare` section.
struct CompareConfig {
  std::vector<std::string> methods{"random", "stratified", "lhs", "uips",
                                   "maxent"};
  std::vector<std::uint64_t> seeds;  // empty: three seeds from the base seed

  friend bool operator==(const CompareConfig&, const CompareConfig&) = default;
};

// `bench` section.
struct BenchConfig {
  std::vector<std::size_t> worker_counts;  // empty: powers of two to host
  std::size_t repeats = 3;
  double knee_threshold = 0.5;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

struct RunConfig {
  DatasetConfig dataset;
  SamplingConfig sampling;
  bool has_subsample = false;
  std::optional<GenerateConfig> generate;
  CompareConfig compare;
  BenchConfig bench;
  // Training keys are kept verbatim so production configs load unmodified; the
  // values are echoed into provenance and otherwise unused.
  std::map<std::string, std::string> train;

  // Grid dims after skip strides, before timesteps are known (nt = 1).
  GridDims grid_dims() const;
  // Throws ConfigError if the sampling section is inconsistent.
  void validate_sampling() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::string_view yaml_text);
RunConfig load_config_file(const std::string& path);
std::string emit_config(const RunConfig& config);

// Expands `{hypercubes}`, `{num_hypercubes}`, `{method}`, `{num_samples}`,
// `{num_clusters}` and `{window}` in the configured (or default) prefix.
std::string file_prefix(const RunConfig& config);

// Stable FNV-1a hash of a string; used for the config hash in provenance.
std::uint64_t fnv1a64(std::string_view text);

// Number of points for a sampling rate r of a volume, rounded half up.
std::size_t points_for_rate(double rate, std::size_t volume);

}  // namespace curator
