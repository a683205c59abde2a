#include "curator/scaling.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <stdexcept>

#include "curator/error.hpp"
#include "curator/pipeline.hpp"

namespace curator {

ScalingResult run_scaling_study(const RunConfig& config, const GridDataset& dataset,
                                std::vector<std::size_t> worker_counts,
                                const ScalingOptions& options) {
  if (options.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  std::sort(worker_counts.begin(), worker_counts.end());
  worker_counts.erase(std::unique(worker_counts.begin(), worker_counts.end()),
                      worker_counts.end());
  if (worker_counts.empty() || worker_counts.front() != 1) {
    throw std::invalid_argument("worker_counts must include 1");
  }

  RunConfig run = config;
  // Pin the seed so every run samples the same cubes and points.
  run.sampling.seed = effective_seed(config);

  ScalingResult result;
  result.knee_threshold = options.knee_threshold;
  std::optional<SampleSet> reference;
  for (std::size_t w : worker_counts) {
    PipelineOptions popts;
    popts.workers = w;
    if (options.inject_mismatch_at && *options.inject_mismatch_at == w) {
      popts.on_cube = [](std::size_t slot, std::vector<SampleRecord>& records) {
        if (slot == 0 && !records.empty() && !records.front().values.empty()) {
          records.front().values.front() += 1.0;
        }
      };
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < options.repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      SampleSet out = run_pipeline(run, dataset, popts);
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start;
      best = std::min(best, elapsed.count());
      if (!reference) {
        reference = std::move(out);
      } else if (!same_samples(*reference, out)) {
        throw InvariantError("output at " + std::to_string(w) +
                             " workers differs from the 1-worker output");
      }
    }
    result.rows.push_back({w, best, 1.0, 1.0});
  }

  const double t1 = result.rows.front().wall_seconds;
  for (auto& row : result.rows) {
    row.speedup = row.workers == 1 ? 1.0 : t1 / row.wall_seconds;
    row.efficiency = row.speedup / static_cast<double>(row.workers);
  }
  if (result.rows.size() >= 3) {
    result.knee_workers = detect_knee(result.rows, options.knee_threshold);
  }
  result.cubes = reference->provenance.cubes.size();
  result.records = reference->records.size();
  return result;
}

std::optional<std::size_t> detect_knee(const std::vector<ScalingRow>& rows,
                                       double threshold) {
  if (rows.size() < 3) throw std::invalid_argument("knee detection needs at least 3 rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].workers <= rows[i - 1].workers) {
      throw std::invalid_argument("scaling rows must be sorted by workers");
    }
  }
  for (const auto& row : rows) {
    if (row.efficiency < threshold) return row.workers;
  }
  return std::nullopt;
}

std::vector<std::size_t> default_worker_counts(std::size_t limit) {
  limit = std::max<std::size_t>(limit, 1);
  std::vector<std::size_t> out;
  for (std::size_t w = 1; w <= limit; w *= 2) out.push_back(w);
  if (out.back() != limit) out.push_back(limit);
  return out;
}

std::string scaling_csv(const ScalingResult& result) {
  std::string out = "workers,wall_seconds,speedup,efficiency\n";
  char buf[128];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.workers, r.wall_seconds,
                  r.speedup, r.efficiency);
    out += buf;
  }
  return out;
}

std::string knee_json(const ScalingResult& result) {
  nlohmann::json j;
  j["knee_workers"] = result.knee_workers ? nlohmann::json(*result.knee_workers)
                                          : nlohmann::json(nullptr);
  j["threshold"] = result.knee_threshold;
  j["rule"] = "smallest worker count with efficiency < threshold";
  j["cubes"] = result.cubes;
  j["records"] = result.records;
  j["time_source"] = "steady_clock, minimum over repeats";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"workers", r.workers},
                    {"wall_seconds", r.wall_seconds},
                    {"speedup", r.speedup},
                    {"efficiency", r.efficiency}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace curator
