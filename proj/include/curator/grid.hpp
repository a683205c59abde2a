#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace curator {

// Grid-point counts of a regular grid. 2D grids are stored with nz = 1.
struct GridDims {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;
  std::size_t nt = 1;
  int dims = 3;

  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  std::size_t points_per_step() const { return nx * ny * nz; }
  std::size_t total_points() const { return points_per_step() * nt; }

  friend bool operator==(const GridDims&, const GridDims&) = default;
};

using Index3 = std::array<std::size_t, 3>;
using Extents3 = std::array<std::size_t, 3>;

// Which stored fields feed which role in a pipeline.
struct VariableRoles {
  std::vector<std::string> input_vars;
  std::vector<std::string> output_vars;
  std::string cluster_var;

  // Inputs, then outputs, then the cluster variable, without repeats.
  std::vector<std::string> all() const;

  friend bool operator==(const VariableRoles&, const VariableRoles&) = default;
};

// Named scalar fields on a regular grid. Each field stores nt snapshots,
// each x-fastest: offset = ((t*nz + k)*ny + j)*nx + i.
class GridDataset {
 public:
  GridDataset() = default;
  GridDataset(GridDims dims, VariableRoles roles);

  const GridDims& dims() const { return dims_; }
  const VariableRoles& roles() const { return roles_; }

  // Adds or replaces a field. Size must equal dims().total_points() and all
  // values must be finite (IoError naming the first bad index otherwise).
  void set_field(const std::string& name, std::vector<double> values);

  bool has_field(const std::string& name) const;
  const std::vector<double>& field(const std::string& name) const;
  std::span<const double> snapshot(const std::string& name,
                                   std::size_t t) const;
  std::vector<std::string> field_names() const;

  double at(const std::string& name, std::size_t t, std::size_t i,
            std::size_t j, std::size_t k) const;

  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * dims_.ny + j) * dims_.nx + i;
  }

  // Throws IoError if a role variable has no field.
  void validate_roles() const;

  // Optional labels for the stored timesteps (file numbers on disk).
  std::vector<long> timestep_labels;

 private:
  GridDims dims_;
  VariableRoles roles_;
  std::map<std::string, std::vector<double>> fields_;
};

// Location of an axis-aligned block inside the grid.
struct BlockDescriptor {
  Index3 origin{0, 0, 0};
  Extents3 extents{1, 1, 1};
  std::size_t timestep = 0;

  std::size_t volume() const { return extents[0] * extents[1] * extents[2]; }
  friend bool operator==(const BlockDescriptor&,
                         const BlockDescriptor&) = default;
};

// A block with its own copy of the role-variable values, x-fastest.
struct HypercubeBlock {
  BlockDescriptor desc;
  GridDims grid;
  std::vector<std::string> variables;
  std::vector<std::vector<double>> values;

  std::size_t volume() const { return desc.volume(); }
  std::span<const double> values_of(const std::string& name) const;
  // Global grid index of a block-local linear index.
  Index3 global_index(std::size_t local) const;
};

// Block descriptors tiling the extent-aligned prefix of the grid, ordered
// x-fastest over block indices. Trailing remainders per axis are dropped
// with a warning stating the dropped point count.
std::vector<BlockDescriptor> partition_grid(const GridDims& dims,
                                            const Extents3& extents,
                                            std::size_t timestep);

// Number of blocks partition_grid would produce, without building them.
std::size_t block_count(const GridDims& dims, const Extents3& extents);

HypercubeBlock extract_block(const GridDataset& dataset,
                             const BlockDescriptor& desc);

// Values of one variable inside a block, x-fastest. Throws std::out_of_range
// for descriptors outside the grid.
std::vector<double> extract_values(const GridDataset& dataset,
                                   const std::string& name,
                                   const BlockDescriptor& desc);

std::vector<HypercubeBlock> partition_hypercubes(const GridDataset& dataset,
                                                 const Extents3& extents,
                                                 std::size_t timestep);

}  // namespace curator
