#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "curator/config.hpp"
#include "curator/grid.hpp"

namespace curator {

struct ScalingRow {
  std::size_t workers = 1;
  double wall_seconds = 0.0;  // minimum over repeats
  double speedup = 1.0;       // T_1 / T_w
  double efficiency = 1.0;    // speedup / workers
};

struct ScalingResult {
  std::vector<ScalingRow> rows;  // ascending workers
  std::optional<std::size_t> knee_workers;
  double knee_threshold = 0.5;
  std::size_t cubes = 0;     // cubes sampled per run
  std::size_t records = 0;   // records per run
};

struct ScalingOptions {
  std::size_t repeats = 3;
  double knee_threshold = 0.5;
  // Test hook: perturb the output of the run at this worker count so the
  // output-equivalence gate can be exercised.
  std::optional<std::size_t> inject_mismatch_at;
};

// Runs the pipeline `repeats` times per worker count and keeps the minimum
// wall time. Every worker count's output must equal the 1-worker output
// record for record; a mismatch throws InvariantError before any timing is
// reported. worker_counts must contain 1.
ScalingResult run_scaling_study(const RunConfig& config, const GridDataset& dataset,
                                std::vector<std::size_t> worker_counts,
                                const ScalingOptions& options = {});

// Smallest worker count whose efficiency is strictly below `threshold`.
// Rows must be sorted by workers; fewer than 3 rows throws.
std::optional<std::size_t> detect_knee(const std::vector<ScalingRow>& rows,
                                       double threshold = 0.5);

// 1, 2, 4, ... up to `limit` (inclusive of limit when it is not a power of two).
std::vector<std::size_t> default_worker_counts(std::size_t limit);

// workers,wall_seconds,speedup,efficiency
std::string scaling_csv(const ScalingResult& result);
// {"knee_workers": n|null, "threshold": x, "cubes": n, "records": n, ...}
std::string knee_json(const ScalingResult& result);

}  // namespace curator
