#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curator/config.hpp"
#include "curator/grid.hpp"
#include "curator/pipeline.hpp"

namespace curator {

// Density-normalized histogram: sum(density * width) = 1 when count > 0.
struct PdfHistogram {
  std::vector<double> edges;      // bins + 1, ascending
  std::vector<double> densities;  // bins
  std::vector<std::size_t> counts;
  std::size_t count = 0;          // values that fell inside the range

  std::size_t bins() const { return densities.size(); }
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
  // Bin of v, or nullopt when v lies outside [edges.front(), edges.back()].
  std::optional<std::size_t> bin_of(double v) const;
};

// Auto range (nullopt) is the observed min-max; a single repeated value v
// gets the range [v - 0.5, v + 0.5]. The top edge is inclusive.
PdfHistogram histogram_pdf(std::span<const double> values, std::size_t bins,
                           std::optional<std::pair<double, double>> range = std::nullopt);

struct VariableCoverage {
  std::string variable;
  double kl_full_to_sample = 0.0;  // D(full || sample), nats
  double occupied_bin_fraction = 0.0;
  double span_ratio = 0.0;
  double tail_capture = 0.0;
};

struct CoverageReport {
  std::vector<VariableCoverage> variables;
  double sampling_seconds = 0.0;
  std::size_t points_emitted = 0;

  const VariableCoverage& of(const std::string& name) const;
};

// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
double percentile(std::span<const double> values, double q);

// Coverage of one variable: histograms share the full-data min-max range.
VariableCoverage variable_coverage(const std::string& name,
                                   std::span<const double> full,
                                   std::span<const double> sample,
                                   std::size_t bins);

// Coverage of every variable in `full`, reading sample values from the
// SampleSet columns of the same name.
CoverageReport coverage_report(const SampleSet& sample,
                               const std::map<std::string, std::vector<double>>& full,
                               std::size_t bins);

// Values of every record's `name` column.
std::vector<double> sample_column(const SampleSet& sample, const std::string& name);

// All points of the cubes a run covered, per variable (the reference the
// run's sample is compared against).
std::map<std::string, std::vector<double>> covered_values(const SampleSet& sample,
                                                          const GridDataset& dataset);

struct ComparisonRow {
  std::string method;
  std::uint64_t seed = 0;
  CoverageReport report;
};

struct ComparisonSummary {
  std::string method;
  std::size_t runs = 0;
  std::vector<VariableCoverage> mean;
  std::vector<VariableCoverage> stddev;  // sample standard deviation (n - 1)
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;           // method-major, then seed
  std::vector<ComparisonSummary> summaries;  // one per method
  // Histograms of the cluster variable for the first seed of each method.
  std::map<std::string, std::pair<PdfHistogram, PdfHistogram>> histograms;
};

// Runs the pipeline for every (method, seed) and scores each run against
// the full data of the cubes it covered.
ComparisonTable compare_methods(const RunConfig& config, const GridDataset& dataset,
                                const std::vector<std::string>& methods,
                                const std::vector<std::uint64_t>& seeds,
                                std::size_t workers = 0);

// Columns method,seed,variable,kl_nats,occupied_bin_fraction,span_ratio,
// tail_capture,sampling_seconds,points with one line per variable. kl_nats
// is D(full || sample). Summaries use `mean` and `std` in the seed column. Timings are wall-clock and vary between runs, so the
// sampling_seconds column is left empty unless include_timings is set.
std::string comparison_csv(const ComparisonTable& table, bool include_timings);

// bin_lo,bin_hi,density_full,density_sample
std::string histogram_csv(const PdfHistogram& full, const PdfHistogram& sample);

// Training-cost proxy: sampling seconds plus kappa * m * p * e, in proxy
// units (never joules).
struct CostEstimate {
  double sampling_cost = 0.0;
  double training_cost_proxy = 0.0;
  double total = 0.0;
};

inline constexpr double kDefaultCostKappa = 1e-9;

CostEstimate cost_estimate(double samples, double parameters, double epochs,
                           double sampling_seconds, double kappa = kDefaultCostKappa);

}  // namespace curator
