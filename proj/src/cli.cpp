#include "curator/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <yaml-cpp/yaml.h>

#include "curator/config.hpp"
#include "curator/error.hpp"
#include "curator/io.hpp"
#include "curator/metrics.hpp"
#include "curator/pipeline.hpp"
#include "curator/sample_io.hpp"
#include "curator/scaling.hpp"
#include "curator/synthetic.hpp"
#include "curator/worker_pool.hpp"

namespace curator {

namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::string config_path;
  std::optional<std::string> method;
  std::optional<std::string> seed;
  std::optional<std::size_t> workers;
  std::string output_dir = "snapshots";
  std::optional<std::size_t> num_samples;
  std::vector<long> timesteps;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  bool record_timings = false;
  std::optional<std::size_t> inject_mismatch;
};

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

RunConfig load(const Overrides& o) {
  RunConfig cfg = load_config_file(o.config_path);
  if (o.method) cfg.sampling.method = parse_point_method(*o.method);
  if (o.seed) {
    if (*o.seed == "unseeded") {
      cfg.sampling.seed.reset();
    } else {
      try {
        std::size_t used = 0;
        cfg.sampling.seed = std::stoull(*o.seed, &used);
        if (used != o.seed->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("--seed must be a nonnegative integer or 'unseeded'");
      }
    }
  }
  if (o.workers) cfg.sampling.workers = *o.workers;
  if (o.num_samples) cfg.sampling.num_samples = *o.num_samples;
  if (!o.timesteps.empty()) cfg.dataset.timesteps = o.timesteps;
  if (!o.methods.empty()) {
    for (const auto& m : o.methods) parse_point_method(m);
    cfg.compare.methods = o.methods;
  }
  if (!o.seeds.empty()) cfg.compare.seeds = o.seeds;
  return cfg;
}

double train_number(const RunConfig& cfg, const std::string& key, double fallback) {
  auto it = cfg.train.find(key);
  if (it == cfg.train.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("train." + key + " must be numeric");
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

int cmd_subsample(const Overrides& o, std::ostream& out) {
  RunConfig cfg = load(o);
  if (!cfg.has_subsample) throw ConfigError("config has no 'subsample' section");
  cfg.validate_sampling();
  const GridDataset dataset = load_dataset(cfg);
  const SampleSet samples = run_pipeline(cfg, dataset);

  const fs::path dir(o.output_dir);
  const std::string prefix = file_prefix(cfg);
  fs::create_directories(dir);
  write_samples_csv(samples, dir / (prefix + ".csv"));

  const auto& prov = samples.provenance;
  const double sampling = prov.phase1_seconds + prov.phase2_seconds;
  const auto cost = cost_estimate(static_cast<double>(samples.records.size()),
                                  train_number(cfg, "parameters", 1e6),
                                  train_number(cfg, "epochs", 1000), sampling);
  nlohmann::json extra;
  extra["cost"] = {{"units", "proxy units"},
                   {"kappa", kDefaultCostKappa},
                   {"sampling_cost", cost.sampling_cost},
                   {"training_cost_proxy", cost.training_cost_proxy},
                   {"total", cost.total}};
  write_sidecar(samples, dir / (prefix + ".json"), extra);

  out << "Output: " << (dir / (prefix + ".csv")).string() << "\n";
  out << "Points emitted: " << samples.records.size() << " from " << prov.cubes.size()
      << " hypercubes\n";
  out << "Phase 1 seconds: " << fixed(prov.phase1_seconds, 6) << "\n";
  out << "Phase 2 seconds: " << fixed(prov.phase2_seconds, 6) << " (" << prov.workers
      << " workers)\n";
  out << "Total Cost Proxy: " << cost.total << " proxy units (sampling "
      << fixed(cost.sampling_cost, 6) << " s + training proxy " << cost.training_cost_proxy
      << ")\n";
  return kExitOk;
}

int cmd_compare(const Overrides& o, std::ostream& out) {
  RunConfig cfg = load(o);
  if (!cfg.has_subsample) throw ConfigError("config has no 'subsample' section");
  auto seeds = cfg.compare.seeds;
  if (seeds.empty()) {
    const std::uint64_t base = effective_seed(cfg);
    seeds = {base, base + 1, base + 2};
  }
  // Validate every method before doing any work.
  for (const auto& m : cfg.compare.methods) {
    RunConfig probe = cfg;
    probe.sampling.method = parse_point_method(m);
    probe.validate_sampling();
  }
  const GridDataset dataset = load_dataset(cfg);
  const auto table = compare_methods(cfg, dataset, cfg.compare.methods, seeds);

  const fs::path dir(o.output_dir);
  write_text(dir / "comparison.csv", comparison_csv(table, o.record_timings));
  for (const auto& [method, hists] : table.histograms) {
    write_text(dir / ("histogram_" + method + ".csv"),
               histogram_csv(hists.first, hists.second));
  }

  nlohmann::json side;
  side["kl_direction"] = "D(full || sample), nats";
  side["reference"] = "all points of the hypercubes each run selected";
  side["bins"] = cfg.sampling.bins;
  side["methods"] = cfg.compare.methods;
  side["seeds"] = seeds;
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& r : table.rows) {
    timings.push_back({{"method", r.method},
                       {"seed", r.seed},
                       {"sampling_seconds", r.report.sampling_seconds}});
  }
  side["timings"] = timings;
  write_text(dir / "comparison.json", side.dump(2) + "\n");

  out << "Compared " << cfg.compare.methods.size() << " methods x " << seeds.size()
      << " seeds\n";
  for (const auto& s : table.summaries) {
    for (const auto& c : s.mean) {
      if (c.variable != cfg.dataset.roles.cluster_var) continue;
      out << "  " << s.method << ": kl=" << c.kl_full_to_sample
          << " occupied=" << c.occupied_bin_fraction << " span=" << c.span_ratio
          << " tail=" << c.tail_capture << "\n";
    }
  }
  out << "Output: " << (dir / "comparison.csv").string() << "\n";
  return kExitOk;
}

int cmd_bench(const Overrides& o, std::ostream& out) {
  RunConfig cfg = load(o);
  if (!cfg.has_subsample) throw ConfigError("config has no 'subsample' section");
  cfg.validate_sampling();
  std::vector<std::size_t> counts;
  if (o.workers) {
    counts = default_worker_counts(*o.workers);
  } else if (!cfg.bench.worker_counts.empty()) {
    counts = cfg.bench.worker_counts;
    if (std::find(counts.begin(), counts.end(), 1) == counts.end()) counts.push_back(1);
  } else {
    counts = default_worker_counts(host_parallelism());
  }
  const GridDataset dataset = load_dataset(cfg);
  ScalingOptions opts;
  opts.repeats = cfg.bench.repeats;
  opts.knee_threshold = cfg.bench.knee_threshold;
  opts.inject_mismatch_at = o.inject_mismatch;
  const auto result = run_scaling_study(cfg, dataset, counts, opts);

  const fs::path dir(o.output_dir);
  write_text(dir / "scaling.csv", scaling_csv(result));
  write_text(dir / "knee.json", knee_json(result));
  for (const auto& r : result.rows) {
    out << "workers=" << r.workers << " wall=" << fixed(r.wall_seconds, 6)
        << "s speedup=" << fixed(r.speedup, 3) << " efficiency=" << fixed(r.efficiency, 3)
        << "\n";
  }
  out << "Knee: "
      << (result.knee_workers ? std::to_string(*result.knee_workers) : std::string("none"))
      << "\n";
  return kExitOk;
}

int cmd_generate(const Overrides& o, std::ostream& out) {
  RunConfig cfg = load(o);
  GeneratorSpec spec = generator_spec(cfg);
  GridDataset dataset = generate(spec);

  const fs::path dir(o.output_dir);
  write_dataset_raw(dataset, dir, cfg.dataset.precision);

  RunConfig ready = cfg;
  ready.dataset.dtype = "sst-binary";
  ready.dataset.path = fs::absolute(dir).lexically_normal().string();
  ready.dataset.skip = {1, 1, 1};
  ready.dataset.roles = dataset.roles();
  ready.dataset.timesteps.reset();
  ready.generate.reset();
  if (!ready.has_subsample) {
    const GridDims dims = dataset.dims();
    auto& s = ready.sampling;
    s.cube = {std::min<std::size_t>(32, dims.nx), std::min<std::size_t>(32, dims.ny),
              std::min<std::size_t>(32, dims.nz)};
    s.hypercubes = CubeMethod::maxent;
    s.method = PointMethod::maxent;
    s.num_hypercubes = std::max<std::size_t>(1, block_count(dims, s.cube) / 4);
    s.num_samples = points_for_rate(0.1, s.cube[0] * s.cube[1] * s.cube[2]);
    // Constant inputs carry no phase-space information for UIPS.
    s.uips_vars.clear();
    for (const auto& v : dataset.roles().input_vars) {
      const auto& f = dataset.field(v);
      auto [mn, mx] = std::minmax_element(f.begin(), f.end());
      if (*mx > *mn && s.uips_vars.size() < 4) s.uips_vars.push_back(v);
    }
    ready.has_subsample = true;
  }
  write_text(dir / "config.yaml", emit_config(ready));

  const auto vars = dataset.roles().all();
  out << "Generated " << spec.kind << " " << dataset.dims().nx << "x" << dataset.dims().ny
      << "x" << dataset.dims().nz << " with " << dataset.dims().nt << " timestep(s)\n";
  out << "Wrote " << vars.size() * dataset.dims().nt << " raw files to " << dir.string()
      << "\n";
  out << "Config: " << (dir / "config.yaml").string() << "\n";
  return kExitOk;
}

int cmd_info(const Overrides& o, std::ostream& out) {
  RunConfig cfg = load(o);
  const GridDims dims = cfg.grid_dims();
  std::size_t nt = 1;
  std::string nt_note;
  if (cfg.dataset.timesteps) {
    nt = cfg.dataset.timesteps->size();
  } else if (!cfg.dataset.path.empty() && fs::is_directory(cfg.dataset.path)) {
    const bool csv = cfg.dataset.dtype == "csv";
    const auto found =
        discover_timesteps(cfg.dataset.path, csv ? "points" : cfg.dataset.roles.cluster_var,
                           csv ? ".csv" : ".bin");
    nt = std::max<std::size_t>(found.size(), 1);
    if (found.empty()) nt_note = " (no files found; assuming 1)";
  } else {
    nt_note = " (path not readable; assuming 1)";
  }

  out << "Effective config:\n" << emit_config(cfg) << "\n";
  out << "Dataset: " << dims.nx << " x " << dims.ny << " x " << dims.nz << " ("
      << dims.dims << "D), " << nt << " timestep(s)" << nt_note << "\n";
  if (!cfg.has_subsample) return kExitOk;
  cfg.validate_sampling();
  const auto& s = cfg.sampling;
  const std::size_t cubes = block_count(dims, s.cube);
  const std::size_t volume = s.cube[0] * s.cube[1] * s.cube[2];
  const std::size_t chosen = std::min(cubes, s.num_hypercubes);
  const std::size_t per_cube = s.method == PointMethod::full ? volume : s.num_samples;
  out << cubes << " hypercubes of " << s.cube[0] << "x" << s.cube[1] << "x" << s.cube[2]
      << " per timestep\n";
  out << "Selecting " << chosen << " per timestep (" << to_string(s.hypercubes) << "), "
      << per_cube << " points each (" << to_string(s.method) << ")\n";
  out << "Expected rows: " << chosen * per_cube * nt << "\n";
  out << "Output prefix: " << file_prefix(cfg) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse, information-rich subsets of gridded spatiotemporal data"};
  app.name("curator");
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", o.config_path, "YAML config file")->required();
    cmd->add_option("--output-dir", o.output_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option("--timesteps", o.timesteps, "Timestep labels to load")->delimiter(',');
  };
  auto add_sampling = [&](CLI::App* cmd) {
    cmd->add_option("--method", o.method, "Point sampler: " + [] {
      std::string s;
      for (const auto& m : point_method_names()) s += (s.empty() ? "" : ", ") + m;
      return s;
    }());
    cmd->add_option("--seed", o.seed, "Seed (integer or 'unseeded')");
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--num-samples", o.num_samples, "Points per hypercube")
        ->check(CLI::PositiveNumber);
  };

  auto* sub = app.add_subcommand("subsample", "Sample a dataset");
  add_common(sub);
  add_sampling(sub);
  auto* cmp = app.add_subcommand("compare", "Compare samplers across seeds");
  add_common(cmp);
  add_sampling(cmp);
  cmp->add_option("--methods", o.methods, "Methods to compare")->delimiter(',');
  cmp->add_option("--seeds", o.seeds, "Seeds to run")->delimiter(',');
  cmp->add_flag("--record-timings", o.record_timings,
                "Fill the sampling_seconds column (output no longer byte-stable)");
  auto* bench = app.add_subcommand("bench", "Parallel scaling study");
  add_common(bench);
  add_sampling(bench);
  bench->add_option("--inject-mismatch", o.inject_mismatch)->group("");
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset and config");
  add_common(gen);
  auto* info = app.add_subcommand("info", "Describe a config without sampling");
  add_common(info);
  add_sampling(info);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'curator --help' for usage\n";
    return kExitUserError;
  }

  try {
    if (sub->parsed()) return cmd_subsample(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
    if (bench->parsed()) return cmd_bench(o, out);
    if (gen->parsed()) return cmd_generate(o, out);
    if (info->parsed()) return cmd_info(o, out);
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const YAML::Exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }
  return kExitUserError;
}

}  // namespace curator
