#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "curator/config.hpp"
#include "curator/grid.hpp"

namespace curator {

// Headerless little-endian reals, x-fastest. `precision` is 4 or 8 bytes.
std::vector<double> read_raw_field(const std::filesystem::path& file,
                                   std::size_t expected_count, int precision);
void write_raw_field(const std::filesystem::path& file,
                     std::span<const double> values, int precision);

// `<dir>/<var>_<timestep>.bin`
std::filesystem::path raw_field_path(const std::filesystem::path& dir,
                                     const std::string& var, long timestep);

// Timestep labels present for `var` in `dir`, ascending.
std::vector<long> discover_timesteps(const std::filesystem::path& dir,
                                     const std::string& var,
                                     std::string_view extension);

// Reads the dataset the config describes: raw binary files (dtype
// "sst-binary") or CSV point clouds (dtype "csv"). Skip strides keep every
// s-th point per axis. Errors are IoError with expected/actual sizes or the
// index of the first non-finite value.
GridDataset load_dataset(const RunConfig& config);

// Writes every role variable of every timestep as raw binary files.
void write_dataset_raw(const GridDataset& dataset,
                       const std::filesystem::path& dir, int precision);

// Writes one timestep as a CSV point cloud (header of variable names).
void write_point_cloud_csv(const GridDataset& dataset, std::size_t timestep,
                           const std::filesystem::path& file);

}  // namespace curator
