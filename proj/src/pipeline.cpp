#include "curator/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <random>

#include "curator/error.hpp"
#include "curator/rng.hpp"
#include "curator/selection.hpp"
#include "curator/worker_pool.hpp"

namespace curator {

namespace {
constexpr std::uint64_t kSaltPhase1 = 0x48706831ULL;  // "Hph1"
constexpr std::uint64_t kSaltCube = 0x58637562ULL;    // "Xcub"

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}
}  // namespace

bool same_samples(const SampleSet& a, const SampleSet& b) {
  return a.variables == b.variables && a.records == b.records;
}

std::uint64_t effective_seed(const RunConfig& config) {
  if (config.sampling.seed) return *config.sampling.seed;
  if (const char* env = std::getenv("CURATOR_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CURATOR_SEED is not an integer: ") + env);
    }
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::uint64_t cube_seed(std::uint64_t seed, std::size_t timestep,
                        std::size_t cube_index) {
  return mix_seed({seed, kSaltCube, timestep, cube_index});
}

PointSamplerParams sampler_params(const RunConfig& config) {
  const auto& s = config.sampling;
  PointSamplerParams p;
  p.method = s.method;
  p.num_samples = s.num_samples;
  p.num_clusters = s.num_clusters;
  p.bins = s.bins;
  p.strata = s.strata;
  p.cluster_var = config.dataset.roles.cluster_var;
  p.uips_vars = s.uips_vars;
  if (p.uips_vars.empty()) {
    const auto& in = config.dataset.roles.input_vars;
    p.uips_vars.assign(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(
                                                    std::min<std::size_t>(4, in.size())));
  }
  return p;
}

SampleSet run_pipeline(const RunConfig& config, const GridDataset& dataset,
                       const PipelineOptions& options) {
  config.validate_sampling();
  dataset.validate_roles();
  const auto& s = config.sampling;
  const std::uint64_t seed = effective_seed(config);
  const std::size_t workers = options.workers ? options.workers : s.workers;
  const auto params = sampler_params(config);
  const auto& cluster_var = config.dataset.roles.cluster_var;

  SampleSet out;
  out.variables = dataset.roles().all();
  auto& prov = out.provenance;
  prov.method = std::string(to_string(s.method));
  prov.hypercube_method = std::string(to_string(s.hypercubes));
  prov.seed = seed;
  prov.workers = workers;
  prov.effective_config = emit_config(config);
  prov.config_hash = fnv1a64(prov.effective_config);

  // Phase 1: hypercube choice per timestep, single-threaded.
  struct Job {
    std::size_t timestep;
    std::size_t cube_index;
    BlockDescriptor block;
  };
  std::vector<Job> jobs;
  const auto phase1_start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < dataset.dims().nt; ++t) {
    const auto blocks = partition_grid(dataset.dims(), s.cube, t);
    if (s.num_hypercubes > blocks.size()) {
      throw ConfigError("num_hypercubes (" + std::to_string(s.num_hypercubes) +
                        ") exceeds the " + std::to_string(blocks.size()) +
                        " hypercubes available");
    }
    const std::uint64_t phase_seed = mix_seed({seed, kSaltPhase1, t});
    std::vector<std::size_t> chosen;
    if (s.hypercubes == CubeMethod::maxent) {
      std::vector<double> pooled;
      std::vector<std::size_t> sizes;
      pooled.reserve(blocks.size() * (blocks.empty() ? 0 : blocks.front().volume()));
      for (const auto& b : blocks) {
        const auto v = extract_values(dataset, cluster_var, b);
        pooled.insert(pooled.end(), v.begin(), v.end());
        sizes.push_back(v.size());
      }
      chosen = select_hypercubes_maxent(pooled, sizes, s.num_clusters, s.num_hypercubes,
                                        phase_seed);
    } else {
      chosen = select_hypercubes_random(blocks.size(), s.num_hypercubes, phase_seed);
    }
    std::sort(chosen.begin(), chosen.end());
    for (auto c : chosen) jobs.push_back({t, c, blocks[c]});
  }
  prov.phase1_seconds = seconds_since(phase1_start);

  // Phase 2: independent cubes on the pool, results placed by slot.
  const auto phase2_start = std::chrono::steady_clock::now();
  std::vector<std::vector<SampleRecord>> per_cube(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t slot) {
    const auto& job = jobs[slot];
    const HypercubeBlock block = extract_block(dataset, job.block);
    const auto local =
        sample_block(block, params, cube_seed(seed, job.timestep, job.cube_index));
    per_cube[slot] = make_records(block, local);
    if (options.on_cube) options.on_cube(slot, per_cube[slot]);
  });
  prov.phase2_seconds = seconds_since(phase2_start);

  std::size_t total = 0;
  for (const auto& r : per_cube) total += r.size();
  out.records.reserve(total);
  for (std::size_t slot = 0; slot < jobs.size(); ++slot) {
    CubeRange range;
    range.timestep = jobs[slot].timestep;
    range.cube_index = jobs[slot].cube_index;
    range.block = jobs[slot].block;
    range.first_record = out.records.size();
    range.record_count = per_cube[slot].size();
    prov.cubes.push_back(range);
    std::move(per_cube[slot].begin(), per_cube[slot].end(),
              std::back_inserter(out.records));
  }
  return out;
}

}  // namespace curator
