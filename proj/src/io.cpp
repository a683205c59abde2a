#include "curator/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "curator/error.hpp"

namespace curator {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

namespace {

template <typename T>
T byteswap_if_needed(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }
}

template <typename Real>
std::vector<double> decode(const std::vector<char>& raw, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) {
    Real v;
    std::memcpy(&v, raw.data() + n * sizeof(Real), sizeof(Real));
    out[n] = static_cast<double>(byteswap_if_needed(v));
  }
  return out;
}

}  // namespace

std::vector<double> read_raw_field(const fs::path& file,
                                   std::size_t expected_count, int precision) {
  if (precision != 4 && precision != 8) {
    throw std::invalid_argument("precision must be 4 or 8");
  }
  std::error_code ec;
  const auto actual = fs::file_size(file, ec);
  if (ec) throw IoError("cannot open dataset file '" + file.string() + "'");
  const auto expected = expected_count * static_cast<std::size_t>(precision);
  if (actual != expected) {
    std::ostringstream msg;
    msg << "size mismatch for '" << file.string() << "': expected " << expected
        << " bytes, found " << actual;
    throw IoError(msg.str());
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + file.string() + "'");
  std::vector<char> raw(expected);
  in.read(raw.data(), static_cast<std::streamsize>(expected));
  if (!in) throw IoError("short read on '" + file.string() + "'");

  auto values = precision == 8 ? decode<double>(raw, expected_count)
                               : decode<float>(raw, expected_count);
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) {
      throw IoError("non-finite value in '" + file.string() + "' at index " +
                    std::to_string(n));
    }
  }
  return values;
}

void write_raw_field(const fs::path& file, std::span<const double> values,
                     int precision) {
  if (precision != 4 && precision != 8) {
    throw std::invalid_argument("precision must be 4 or 8");
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  std::vector<char> raw(values.size() * static_cast<std::size_t>(precision));
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (precision == 8) {
      double v = byteswap_if_needed(values[n]);
      std::memcpy(raw.data() + n * 8, &v, 8);
    } else {
      float v = byteswap_if_needed(static_cast<float>(values[n]));
      std::memcpy(raw.data() + n * 4, &v, 4);
    }
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

fs::path raw_field_path(const fs::path& dir, const std::string& var,
                        long timestep) {
  return dir / (var + "_" + std::to_string(timestep) + ".bin");
}

std::vector<long> discover_timesteps(const fs::path& dir,
                                     const std::string& var,
                                     std::string_view extension) {
  std::vector<long> out;
  std::error_code ec;
  const std::string prefix = var + "_";
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (!name.starts_with(prefix) || !name.ends_with(extension)) continue;
    const auto middle = name.substr(
        prefix.size(), name.size() - prefix.size() - extension.size());
    if (middle.empty() ||
        middle.find_first_not_of("0123456789") != std::string::npos) {
      continue;
    }
    out.push_back(std::stol(middle));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Keeps every s-th point per axis of one x-fastest snapshot.
std::vector<double> apply_skip(std::span<const double> full, std::size_t nx,
                               std::size_t ny, std::size_t nz,
                               const Extents3& skip, const GridDims& out) {
  std::vector<double> reduced;
  reduced.reserve(out.points_per_step());
  for (std::size_t k = 0; k < nz; k += skip[2]) {
    for (std::size_t j = 0; j < ny; j += skip[1]) {
      for (std::size_t i = 0; i < nx; i += skip[0]) {
        reduced.push_back(full[(k * ny + j) * nx + i]);
      }
    }
  }
  return reduced;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

// One CSV point cloud -> column name -> values (row order preserved).
std::map<std::string, std::vector<double>> read_point_cloud(
    const fs::path& file, std::size_t expected_rows) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open dataset file '" + file.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV '" + file.string() + "'");
  const auto header = split_csv_line(line);
  std::vector<std::vector<double>> columns(header.size());
  for (auto& c : columns) c.reserve(expected_rows);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IoError("row " + std::to_string(row + 1) + " of '" +
                    file.string() + "' has " + std::to_string(cells.size()) +
                    " columns, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || !std::isfinite(v)) {
        throw IoError("non-finite or unparsable value in '" + file.string() +
                      "' at row " + std::to_string(row) + ", column '" +
                      header[c] + "'");
      }
      columns[c].push_back(v);
    }
    ++row;
  }
  if (row != expected_rows) {
    throw IoError("size mismatch for '" + file.string() + "': expected " +
                  std::to_string(expected_rows) + " rows, found " +
                  std::to_string(row));
  }
  std::map<std::string, std::vector<double>> out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    out[header[c]] = std::move(columns[c]);
  }
  return out;
}

}  // namespace

GridDataset load_dataset(const RunConfig& config) {
  const auto& ds = config.dataset;
  if (ds.path.empty()) throw IoError("dataset path is not set");
  const fs::path root(ds.path);
  if (!fs::exists(root)) {
    throw IoError("dataset path '" + ds.path + "' does not exist");
  }

  const bool csv = ds.dtype == "csv";
  if (!csv && ds.dtype != "sst-binary") {
    throw ConfigError("unsupported dtype '" + ds.dtype +
                      "' (valid: sst-binary, csv)");
  }

  std::vector<long> labels;
  if (csv && fs::is_regular_file(root)) {
    labels = {0};
  } else if (ds.timesteps) {
    labels = *ds.timesteps;
  } else {
    labels = csv ? discover_timesteps(root, "points", ".csv")
                 : discover_timesteps(root, ds.roles.cluster_var, ".bin");
    if (labels.empty()) {
      throw IoError("no files for variable '" +
                    (csv ? std::string("points") : ds.roles.cluster_var) +
                    "' found under '" + ds.path + "'");
    }
  }

  GridDims dims = config.grid_dims();
  dims.nt = labels.size();
  const std::size_t raw_nz = ds.dims == 2 ? 1 : ds.nz;
  const std::size_t raw_points = ds.nx * ds.ny * raw_nz;

  GridDataset dataset(dims, ds.roles);
  dataset.timestep_labels = labels;
  const auto vars = ds.roles.all();
  std::map<std::string, std::vector<double>> fields;
  for (const auto& v : vars) fields[v].reserve(dims.total_points());

  for (long label : labels) {
    if (csv) {
      const fs::path file = fs::is_regular_file(root)
                                ? root
                                : root / ("points_" + std::to_string(label) + ".csv");
      auto columns = read_point_cloud(file, raw_points);
      for (const auto& v : vars) {
        auto it = columns.find(v);
        if (it == columns.end()) {
          throw IoError("column '" + v + "' missing from '" + file.string() + "'");
        }
        auto reduced = apply_skip(it->second, ds.nx, ds.ny, raw_nz, ds.skip, dims);
        fields[v].insert(fields[v].end(), reduced.begin(), reduced.end());
      }
    } else {
      for (const auto& v : vars) {
        auto full = read_raw_field(raw_field_path(root, v, label), raw_points,
                                   ds.precision);
        auto reduced = apply_skip(full, ds.nx, ds.ny, raw_nz, ds.skip, dims);
        fields[v].insert(fields[v].end(), reduced.begin(), reduced.end());
      }
    }
  }
  for (auto& [name, values] : fields) dataset.set_field(name, std::move(values));
  dataset.validate_roles();
  return dataset;
}

void write_dataset_raw(const GridDataset& dataset, const fs::path& dir,
                       int precision) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < dataset.dims().nt; ++t) {
    const long label = t < dataset.timestep_labels.size()
                           ? dataset.timestep_labels[t]
                           : static_cast<long>(t);
    for (const auto& v : dataset.roles().all()) {
      write_raw_field(raw_field_path(dir, v, label), dataset.snapshot(v, t),
                      precision);
    }
  }
}

void write_point_cloud_csv(const GridDataset& dataset, std::size_t timestep,
                           const fs::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  const auto vars = dataset.roles().all();
  for (std::size_t v = 0; v < vars.size(); ++v) {
    out << (v ? "," : "") << vars[v];
  }
  out << '\n';
  std::vector<std::span<const double>> cols;
  for (const auto& v : vars) cols.push_back(dataset.snapshot(v, timestep));
  char buf[32];
  for (std::size_t n = 0; n < dataset.dims().points_per_step(); ++n) {
    for (std::size_t v = 0; v < cols.size(); ++v) {
      std::snprintf(buf, sizeof buf, "%.17g", cols[v][n]);
      out << (v ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace curator
