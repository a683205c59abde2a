#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curator/config.hpp"
#include "curator/grid.hpp"
#include "curator/samplers.hpp"

namespace curator {

// Which records came from which cube.
struct CubeRange {
  std::size_t timestep = 0;
  std::size_t cube_index = 0;  // position in the partition order
  BlockDescriptor block;
  std::size_t first_record = 0;
  std::size_t record_count = 0;

  friend bool operator==(const CubeRange&, const CubeRange&) = default;
};

struct Provenance {
  std::string method;
  std::string hypercube_method;
  std::uint64_t seed = 0;  // effective seed (drawn when unseeded)
  std::uint64_t config_hash = 0;
  std::vector<CubeRange> cubes;
  double phase1_seconds = 0.0;
  double phase2_seconds = 0.0;
  std::size_t workers = 1;
  std::string effective_config;  // emitted YAML

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SampleSet {
  std::vector<std::string> variables;
  std::vector<SampleRecord> records;
  Provenance provenance;
};

// Record payload equality (variables and records, not provenance).
bool same_samples(const SampleSet& a, const SampleSet& b);

struct PipelineOptions {
  std::size_t workers = 0;  // 0: use config.sampling.workers
  // Test hook: called after each cube's records are built.
  std::function<void(std::size_t cube_slot, std::vector<SampleRecord>&)> on_cube;
};

// Per timestep: partition, choose hypercubes (phase 1, single-threaded),
// sample points in each chosen cube (phase 2, on the worker pool), then
// concatenate by (timestep, cube index). Each cube draws from a stream
// seeded by mix(seed, timestep, cube index), so output is independent of
// worker count and processing order.
SampleSet run_pipeline(const RunConfig& config, const GridDataset& dataset,
                       const PipelineOptions& options = {});

// Seed used by a run: the configured one, else CURATOR_SEED from the
// environment, else a fresh random value.
std::uint64_t effective_seed(const RunConfig& config);

// Stream seed of one cube.
std::uint64_t cube_seed(std::uint64_t seed, std::size_t timestep,
                        std::size_t cube_index);

PointSamplerParams sampler_params(const RunConfig& config);

}  // namespace curator
