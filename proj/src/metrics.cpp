#include "curator/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "curator/entropy.hpp"

namespace curator {

std::optional<std::size_t> PdfHistogram::bin_of(double v) const {
  if (edges.size() < 2 || v < edges.front() || v > edges.back()) return std::nullopt;
  const double lo = edges.front();
  const double hi = edges.back();
  const auto b = static_cast<std::size_t>(
      std::floor((v - lo) / (hi - lo) * static_cast<double>(bins())));
  return std::min(b, bins() - 1);
}

PdfHistogram histogram_pdf(std::span<const double> values, std::size_t bins,
                           std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  double lo;
  double hi;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(hi > lo)) throw std::invalid_argument("histogram range needs hi > lo");
  } else if (values.empty()) {
    lo = 0.0;
    hi = 1.0;
  } else {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }

  PdfHistogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  h.densities.assign(bins, 0.0);
  for (double v : values) {
    if (auto b = h.bin_of(v)) {
      ++h.counts[*b];
      ++h.count;
    }
  }
  if (h.count > 0) {
    for (std::size_t b = 0; b < bins; ++b) {
      h.densities[b] = static_cast<double>(h.counts[b]) /
                       (static_cast<double>(h.count) * h.width(b));
    }
  }
  return h;
}

const VariableCoverage& CoverageReport::of(const std::string& name) const {
  for (const auto& v : variables) {
    if (v.variable == name) return v;
  }
  throw std::invalid_argument("no coverage for variable '" + name + "'");
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty data");
  std::vector<double> v(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  double b = a;
  if (hi != lo) {
    b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  }
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

VariableCoverage variable_coverage(const std::string& name,
                                   std::span<const double> full,
                                   std::span<const double> sample,
                                   std::size_t bins) {
  if (full.empty()) throw std::invalid_argument("no full data for '" + name + "'");
  if (sample.empty()) throw std::invalid_argument("empty sample for '" + name + "'");
  auto [fmin, fmax] = std::minmax_element(full.begin(), full.end());
  const double lo = *fmin;
  const double hi = *fmax;
  const auto range = hi > lo ? std::make_pair(lo, hi) : std::make_pair(lo - 0.5, hi + 0.5);

  const auto hf = histogram_pdf(full, bins, range);
  const auto hs = histogram_pdf(sample, bins, range);

  VariableCoverage c;
  c.variable = name;

  // Bin probabilities on the shared range.
  std::vector<double> pf(bins);
  std::vector<double> ps(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    pf[b] = static_cast<double>(hf.counts[b]) / static_cast<double>(hf.count);
    if (hs.count > 0) ps[b] = static_cast<double>(hs.counts[b]) / static_cast<double>(hs.count);
  }
  c.kl_full_to_sample = kl_divergence(pf, ps);

  std::size_t occupied = 0;
  for (auto n : hs.counts) occupied += n > 0 ? 1 : 0;
  c.occupied_bin_fraction = static_cast<double>(occupied) / static_cast<double>(bins);

  auto [smin, smax] = std::minmax_element(sample.begin(), sample.end());
  c.span_ratio = hi > lo ? std::clamp((*smax - *smin) / (hi - lo), 0.0, 1.0) : 1.0;

  const double p1 = percentile(full, 1.0);
  const double p99 = percentile(full, 99.0);
  std::size_t tail = 0;
  std::size_t captured = 0;
  for (double v : full) {
    if (v < p1 || v > p99) {
      ++tail;
      if (auto b = hs.bin_of(v); b && hs.counts[*b] > 0) ++captured;
    }
  }
  c.tail_capture = tail > 0 ? static_cast<double>(captured) / static_cast<double>(tail) : 1.0;
  return c;
}

std::vector<double> sample_column(const SampleSet& sample, const std::string& name) {
  auto it = std::find(sample.variables.begin(), sample.variables.end(), name);
  if (it == sample.variables.end()) {
    throw std::invalid_argument("variable '" + name + "' missing from sample");
  }
  const auto col = static_cast<std::size_t>(it - sample.variables.begin());
  std::vector<double> out;
  out.reserve(sample.records.size());
  for (const auto& r : sample.records) out.push_back(r.values[col]);
  return out;
}

CoverageReport coverage_report(const SampleSet& sample,
                               const std::map<std::string, std::vector<double>>& full,
                               std::size_t bins) {
  if (sample.records.empty()) throw std::invalid_argument("coverage of an empty sample");
  CoverageReport report;
  report.points_emitted = sample.records.size();
  report.sampling_seconds =
      sample.provenance.phase1_seconds + sample.provenance.phase2_seconds;
  for (const auto& [name, values] : full) {
    const auto column = sample_column(sample, name);
    report.variables.push_back(variable_coverage(name, values, column, bins));
  }
  return report;
}

std::map<std::string, std::vector<double>> covered_values(const SampleSet& sample,
                                                          const GridDataset& dataset) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& name : sample.variables) {
    auto& dst = out[name];
    for (const auto& cube : sample.provenance.cubes) {
      auto v = extract_values(dataset, name, cube.block);
      dst.insert(dst.end(), v.begin(), v.end());
    }
  }
  return out;
}

namespace {

VariableCoverage combine(const std::vector<const VariableCoverage*>& items,
                         bool stddev) {
  VariableCoverage out;
  if (items.empty()) return out;
  out.variable = items.front()->variable;
  auto stat = [&](double VariableCoverage::*field) {
    double mean = 0.0;
    for (const auto* c : items) mean += c->*field;
    mean /= static_cast<double>(items.size());
    if (!stddev) return mean;
    if (items.size() < 2) return 0.0;
    double ss = 0.0;
    for (const auto* c : items) ss += (c->*field - mean) * (c->*field - mean);
    return std::sqrt(ss / static_cast<double>(items.size() - 1));
  };
  out.kl_full_to_sample = stat(&VariableCoverage::kl_full_to_sample);
  out.occupied_bin_fraction = stat(&VariableCoverage::occupied_bin_fraction);
  out.span_ratio = stat(&VariableCoverage::span_ratio);
  out.tail_capture = stat(&VariableCoverage::tail_capture);
  return out;
}

std::pair<double, double> shared_range(const std::vector<double>& values) {
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return *mx > *mn ? std::make_pair(*mn, *mx) : std::make_pair(*mn - 0.5, *mx + 0.5);
}

}  // namespace

ComparisonTable compare_methods(const RunConfig& config, const GridDataset& dataset,
                                const std::vector<std::string>& methods,
                                const std::vector<std::uint64_t>& seeds,
                                std::size_t workers) {
  if (methods.empty()) throw std::invalid_argument("compare_methods: no methods");
  if (seeds.empty()) throw std::invalid_argument("compare_methods: no seeds");
  ComparisonTable table;
  const auto& cluster_var = config.dataset.roles.cluster_var;
  const std::size_t bins = config.sampling.bins;
  for (const auto& method : methods) {
    RunConfig run = config;
    run.sampling.method = parse_point_method(method);
    const std::size_t first = table.rows.size();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      run.sampling.seed = seeds[s];
      PipelineOptions opts;
      opts.workers = workers;
      const SampleSet sample = run_pipeline(run, dataset, opts);
      const auto full = covered_values(sample, dataset);
      table.rows.push_back({method, seeds[s], coverage_report(sample, full, bins)});
      if (s == 0) {
        const auto& values = full.at(cluster_var);
        const auto range = shared_range(values);
        table.histograms[method] = {
            histogram_pdf(values, bins, range),
            histogram_pdf(sample_column(sample, cluster_var), bins, range)};
      }
    }
    ComparisonSummary summary;
    summary.method = method;
    summary.runs = table.rows.size() - first;
    const std::size_t nvars = table.rows[first].report.variables.size();
    for (std::size_t v = 0; v < nvars; ++v) {
      std::vector<const VariableCoverage*> items;
      for (std::size_t r = first; r < table.rows.size(); ++r) {
        items.push_back(&table.rows[r].report.variables[v]);
      }
      summary.mean.push_back(combine(items, false));
      summary.stddev.push_back(combine(items, true));
    }
    table.summaries.push_back(std::move(summary));
  }
  return table;
}

namespace {

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string coverage_fields(const VariableCoverage& c) {
  return real(c.kl_full_to_sample) + "," + real(c.occupied_bin_fraction) + "," +
         real(c.span_ratio) + "," + real(c.tail_capture);
}

}  // namespace

std::string comparison_csv(const ComparisonTable& table, bool include_timings) {
  std::string out =
      "method,seed,variable,kl_nats,occupied_bin_fraction,span_ratio,"
      "tail_capture,sampling_seconds,points\n";
  for (const auto& r : table.rows) {
    const std::string timing = include_timings ? real(r.report.sampling_seconds) : "";
    for (const auto& c : r.report.variables) {
      out += r.method + "," + std::to_string(r.seed) + "," + c.variable + "," +
             coverage_fields(c) + "," + timing + "," +
             std::to_string(r.report.points_emitted) + "\n";
    }
  }
  for (const auto& s : table.summaries) {
    for (const auto& c : s.mean) {
      out += s.method + ",mean," + c.variable + "," + coverage_fields(c) + ",,\n";
    }
    for (const auto& c : s.stddev) {
      out += s.method + ",std," + c.variable + "," + coverage_fields(c) + ",,\n";
    }
  }
  return out;
}

std::string histogram_csv(const PdfHistogram& full, const PdfHistogram& sample) {
  if (full.bins() != sample.bins()) {
    throw std::invalid_argument("histograms must share bins");
  }
  std::string out = "bin_lo,bin_hi,density_full,density_sample\n";
  for (std::size_t b = 0; b < full.bins(); ++b) {
    out += real(full.edges[b]) + "," + real(full.edges[b + 1]) + "," +
           real(full.densities[b]) + "," + real(sample.densities[b]) + "\n";
  }
  return out;
}

CostEstimate cost_estimate(double samples, double parameters, double epochs,
                           double sampling_seconds, double kappa) {
  if (samples < 0 || parameters < 0 || epochs < 0 || sampling_seconds < 0 || kappa < 0) {
    throw std::invalid_argument("cost_estimate inputs must be nonnegative");
  }
  CostEstimate c;
  c.sampling_cost = sampling_seconds;
  c.training_cost_proxy = kappa * samples * parameters * epochs;
  c.total = c.sampling_cost + c.training_cost_proxy;
  return c;
}

}  // namespace curator
