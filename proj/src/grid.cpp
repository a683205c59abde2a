#include "curator/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "curator/error.hpp"
#include "curator/log.hpp"

namespace curator {

void GridDims::validate() const {
  if (nx < 1 || ny < 1 || nz < 1 || nt < 1) {
    throw std::invalid_argument("grid dimensions must be >= 1");
  }
  if (dims != 2 && dims != 3) {
    throw std::invalid_argument("dims must be 2 or 3");
  }
  if (dims == 2 && nz != 1) {
    throw std::invalid_argument("2D grids must have nz = 1");
  }
}

std::vector<std::string> VariableRoles::all() const {
  std::vector<std::string> out;
  auto push = [&out](const std::string& name) {
    if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  };
  for (const auto& v : input_vars) push(v);
  for (const auto& v : output_vars) push(v);
  push(cluster_var);
  return out;
}

GridDataset::GridDataset(GridDims dims, VariableRoles roles)
    : dims_(dims), roles_(std::move(roles)) {
  dims_.validate();
}

void GridDataset::set_field(const std::string& name,
                            std::vector<double> values) {
  if (values.size() != dims_.total_points()) {
    std::ostringstream msg;
    msg << "field '" << name << "' has " << values.size()
        << " values, expected " << dims_.total_points();
    throw IoError(msg.str());
  }
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) {
      std::ostringstream msg;
      msg << "non-finite value in field '" << name << "' at index " << n;
      throw IoError(msg.str());
    }
  }
  fields_[name] = std::move(values);
}

bool GridDataset::has_field(const std::string& name) const {
  return fields_.contains(name);
}

const std::vector<double>& GridDataset::field(const std::string& name) const {
  auto it = fields_.find(name);
  if (it == fields_.end()) throw IoError("no field named '" + name + "'");
  return it->second;
}

std::span<const double> GridDataset::snapshot(const std::string& name,
                                              std::size_t t) const {
  if (t >= dims_.nt) throw std::out_of_range("timestep out of range");
  const auto& f = field(name);
  const std::size_t n = dims_.points_per_step();
  return std::span<const double>(f).subspan(t * n, n);
}

std::vector<std::string> GridDataset::field_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : fields_) names.push_back(name);
  return names;
}

double GridDataset::at(const std::string& name, std::size_t t, std::size_t i,
                       std::size_t j, std::size_t k) const {
  return snapshot(name, t)[offset(i, j, k)];
}

void GridDataset::validate_roles() const {
  for (const auto& name : roles_.all()) {
    if (!has_field(name)) {
      throw IoError("role variable '" + name + "' missing from dataset");
    }
  }
}

std::span<const double> HypercubeBlock::values_of(
    const std::string& name) const {
  for (std::size_t v = 0; v < variables.size(); ++v) {
    if (variables[v] == name) return values[v];
  }
  throw std::invalid_argument("block has no variable '" + name + "'");
}

Index3 HypercubeBlock::global_index(std::size_t local) const {
  const auto& e = desc.extents;
  const std::size_t i = local % e[0];
  const std::size_t j = (local / e[0]) % e[1];
  const std::size_t k = local / (e[0] * e[1]);
  return {desc.origin[0] + i, desc.origin[1] + j, desc.origin[2] + k};
}

namespace {

std::array<std::size_t, 3> grid_extent(const GridDims& d) {
  return {d.nx, d.ny, d.nz};
}

void check_extents(const GridDims& dims, const Extents3& extents) {
  const auto g = grid_extent(dims);
  for (int a = 0; a < 3; ++a) {
    if (extents[a] < 1) {
      throw std::invalid_argument("cube extents must be >= 1");
    }
    if (extents[a] > g[a]) {
      std::ostringstream msg;
      msg << "cube extent " << extents[a] << " exceeds grid extent " << g[a]
          << " on axis " << "xyz"[a];
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

std::size_t block_count(const GridDims& dims, const Extents3& extents) {
  check_extents(dims, extents);
  const auto g = grid_extent(dims);
  return (g[0] / extents[0]) * (g[1] / extents[1]) * (g[2] / extents[2]);
}

std::vector<BlockDescriptor> partition_grid(const GridDims& dims,
                                            const Extents3& extents,
                                            std::size_t timestep) {
  if (timestep >= dims.nt) throw std::out_of_range("timestep out of range");
  check_extents(dims, extents);
  const auto g = grid_extent(dims);
  const std::size_t bx = g[0] / extents[0];
  const std::size_t by = g[1] / extents[1];
  const std::size_t bz = g[2] / extents[2];

  const std::size_t covered = bx * extents[0] * by * extents[1] * bz * extents[2];
  const std::size_t dropped = dims.points_per_step() - covered;
  if (dropped > 0) {
    std::ostringstream msg;
    msg << "grid " << g[0] << "x" << g[1] << "x" << g[2]
        << " is not divisible by cube extents " << extents[0] << "x"
        << extents[1] << "x" << extents[2] << "; " << dropped
        << " boundary points per timestep excluded";
    warn(msg.str());
  }

  std::vector<BlockDescriptor> blocks;
  blocks.reserve(bx * by * bz);
  for (std::size_t kb = 0; kb < bz; ++kb) {
    for (std::size_t jb = 0; jb < by; ++jb) {
      for (std::size_t ib = 0; ib < bx; ++ib) {
        blocks.push_back(BlockDescriptor{
            {ib * extents[0], jb * extents[1], kb * extents[2]},
            extents,
            timestep});
      }
    }
  }
  return blocks;
}

namespace {

void check_block(const GridDims& d, const BlockDescriptor& desc) {
  const auto g = grid_extent(d);
  if (desc.timestep >= d.nt) {
    throw std::out_of_range("block timestep out of range");
  }
  for (int a = 0; a < 3; ++a) {
    if (desc.extents[a] < 1 || desc.origin[a] + desc.extents[a] > g[a]) {
      std::ostringstream msg;
      msg << "block [" << desc.origin[a] << ", "
          << desc.origin[a] + desc.extents[a] << ") out of bounds on axis "
          << "xyz"[a] << " (extent " << g[a] << ")";
      throw std::out_of_range(msg.str());
    }
  }
}

}  // namespace

std::vector<double> extract_values(const GridDataset& dataset,
                                   const std::string& name,
                                   const BlockDescriptor& desc) {
  check_block(dataset.dims(), desc);
  const auto& [ox, oy, oz] = desc.origin;
  const auto& [sx, sy, sz] = desc.extents;
  auto snap = dataset.snapshot(name, desc.timestep);
  std::vector<double> out(desc.volume());
  auto dst = out.begin();
  for (std::size_t k = 0; k < sz; ++k) {
    for (std::size_t j = 0; j < sy; ++j) {
      auto row = snap.begin() + static_cast<std::ptrdiff_t>(
                                    dataset.offset(ox, oy + j, oz + k));
      dst = std::copy(row, row + static_cast<std::ptrdiff_t>(sx), dst);
    }
  }
  return out;
}

HypercubeBlock extract_block(const GridDataset& dataset,
                             const BlockDescriptor& desc) {
  check_block(dataset.dims(), desc);
  HypercubeBlock block;
  block.desc = desc;
  block.grid = dataset.dims();
  block.variables = dataset.roles().all();
  block.values.reserve(block.variables.size());
  for (const auto& name : block.variables) {
    block.values.push_back(extract_values(dataset, name, desc));
  }
  return block;
}

std::vector<HypercubeBlock> partition_hypercubes(const GridDataset& dataset,
                                                 const Extents3& extents,
                                                 std::size_t timestep) {
  std::vector<HypercubeBlock> out;
  for (const auto& desc : partition_grid(dataset.dims(), extents, timestep)) {
    out.push_back(extract_block(dataset, desc));
  }
  return out;
}

}  // namespace curator
