#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "curator/cli.hpp"
#include "curator/config.hpp"
#include "curator/entropy.hpp"
#include "curator/error.hpp"
#include "curator/io.hpp"
#include "curator/metrics.hpp"
#include "curator/pipeline.hpp"
#include "curator/rng.hpp"
#include "curator/samplers.hpp"
#include "curator/selection.hpp"

namespace py = pybind11;
using namespace curator;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}

std::vector<ClusterDistribution> distributions(const std::vector<std::vector<double>>& rows) {
  std::vector<ClusterDistribution> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r});
  return out;
}

py::dict sample_set_dict(const SampleSet& s) {
  const std::size_t n = s.records.size();
  const std::size_t nv = s.variables.size();
  py::array_t<double> values({n, nv});
  py::array_t<std::int64_t> index({n, std::size_t{3}});
  py::array_t<std::int64_t> timestep(n);
  auto v = values.mutable_unchecked<2>();
  auto ix = index.mutable_unchecked<2>();
  auto ts = timestep.mutable_unchecked<1>();
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = s.records[r];
    for (std::size_t c = 0; c < nv; ++c) v(r, c) = rec.values[c];
    for (std::size_t d = 0; d < 3; ++d) ix(r, d) = static_cast<std::int64_t>(rec.index[d]);
    ts(r) = static_cast<std::int64_t>(rec.timestep);
  }
  py::dict out;
  out["variables"] = s.variables;
  out["values"] = values;
  out["index"] = index;
  out["timestep"] = timestep;
  out["seed"] = s.provenance.seed;
  return out;
}

}  // namespace

PYBIND11_MODULE(_curator, m) {
  m.doc() = "Sparse data curation: maximum-entropy and baseline subsampling";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  m.def("kl_divergence",
        [](const Array& p, const Array& q, double eps) {
          return kl_divergence(view(p), view(q), eps);
        },
        py::arg("p"), py::arg("q"), py::arg("epsilon") = kDefaultEpsilon,
        "KL divergence D(p||q) in nats with epsilon smoothing.");

  m.def("adjacency_matrix",
        [](const std::vector<std::vector<double>>& dists, double eps) {
          const auto g = adjacency_matrix(distributions(dists), eps);
          py::array_t<double> a({g.n, g.n});
          std::copy(g.adjacency.begin(), g.adjacency.end(), a.mutable_data());
          return py::make_tuple(a, g.strengths);
        },
        py::arg("distributions"), py::arg("epsilon") = kDefaultEpsilon,
        "Pairwise KL matrix and node strengths (row sums).");

  m.def("allocate_counts",
        [](const std::vector<double>& strengths, long long total) {
          return allocate_counts(strengths, total);
        },
        py::arg("strengths"), py::arg("total"));

  m.def("select_random",
        [](std::size_t volume, std::size_t n, std::uint64_t seed) {
          Rng rng(seed);
          return select_random(volume, n, rng);
        },
        py::arg("volume"), py::arg("n"), py::arg("seed") = 0);

  m.def("select_uips",
        [](const Array& features, std::size_t n, std::size_t bins, std::uint64_t seed) {
          const std::size_t dims = features.ndim() == 2 ? features.shape(1) : 1;
          Rng rng(seed);
          return select_uips(PointMatrix{view(features), dims}, n, bins, rng);
        },
        py::arg("features"), py::arg("n"), py::arg("bins") = 100, py::arg("seed") = 0,
        "Indices of n points drawn uniformly in phase space. features: (N,) or (N, d).");

  m.def("select_maxent_points",
        [](const Array& values, std::size_t n, std::size_t clusters, std::size_t bins,
           std::uint64_t seed) {
          MaxentPointOptions opt;
          opt.num_clusters = clusters;
          opt.bins = bins;
          return select_maxent_points(view(values), n, opt, seed);
        },
        py::arg("values"), py::arg("n"), py::arg("num_clusters") = 20, py::arg("bins") = 100,
        py::arg("seed") = 0);

  m.def("select_hypercubes_maxent",
        [](const std::vector<std::vector<double>>& blocks, std::size_t clusters,
           std::size_t count, std::uint64_t seed) {
          return select_hypercubes_maxent(blocks, clusters, count, seed);
        },
        py::arg("blocks"), py::arg("num_clusters"), py::arg("m"), py::arg("seed") = 0);

  m.def("temporal_select",
        [](const std::vector<std::vector<double>>& hists, std::size_t count) {
          return temporal_select(hists, count);
        },
        py::arg("histograms"), py::arg("m"));

  m.def("points_for_rate", &points_for_rate, py::arg("rate"), py::arg("volume"));

  m.def("cost_estimate",
        [](double samples, double parameters, double epochs, double seconds, double kappa) {
          const auto c = cost_estimate(samples, parameters, epochs, seconds, kappa);
          py::dict out;
          out["sampling_cost"] = c.sampling_cost;
          out["training_cost_proxy"] = c.training_cost_proxy;
          out["total"] = c.total;
          return out;
        },
        py::arg("samples"), py::arg("parameters"), py::arg("epochs"),
        py::arg("sampling_seconds") = 0.0, py::arg("kappa") = kDefaultCostKappa);

  m.def("subsample",
        [](const std::string& config_path, std::optional<std::uint64_t> seed,
           std::size_t workers) {
          auto cfg = load_config_file(config_path);
          if (seed) cfg.sampling.seed = seed;
          cfg.validate_sampling();
          SampleSet s;
          {
            py::gil_scoped_release release;
            const auto dataset = load_dataset(cfg);
            PipelineOptions opt;
            opt.workers = workers;
            s = run_pipeline(cfg, dataset, opt);
          }
          return sample_set_dict(s);
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("workers") = 0,
        "Runs the two-phase pipeline for a YAML config and returns the samples.");

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a CLI invocation; returns (exit_code, stdout, stderr).");
}
