#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nvmg/exec.hpp"
#include "nvmg/geometry.hpp"

namespace nvmg {

struct GridCoord {
  int x = 0, y = 0, z = 0;
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

// Maps lattice point (i, j, k) to origin + edge * (i, j, k); voxel (x, y, z)
// spans [x, x+1] x [y, y+1] x [z, z+1] in lattice units.
struct VoxelFrame {
  Vec3 origin{0, 0, 0};
  double edge = 1.0;

  Vec3 to_world(const Vec3& lattice) const { return origin + lattice * edge; }
  Vec3 to_lattice(const Vec3& world) const { return (world - origin) / edge; }
  Vec3 voxel_center(const GridCoord& c) const {
    return to_world({c.x + 0.5, c.y + 0.5, c.z + 0.5});
  }
  friend bool operator==(const VoxelFrame&, const VoxelFrame&) = default;
};

// Binary occupancy grid of r^3 voxels, linearized x-fastest.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  // All-empty grid. The default frame is the normalized unit-cube frame.
  explicit VoxelGrid(int resolution);
  VoxelGrid(int resolution, VoxelFrame frame);
  VoxelGrid(int resolution, VoxelFrame frame, std::vector<std::uint8_t> occupancy);

  static VoxelFrame unit_cube_frame(int resolution) { return {{0, 0, 0}, 1.0 / resolution}; }

  int resolution() const { return r_; }
  const VoxelFrame& frame() const { return frame_; }
  std::size_t size() const { return occ_.size(); }
  const std::vector<std::uint8_t>& occupancy() const { return occ_; }

  bool in_range(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < r_ && y < r_ && z < r_;
  }
  bool in_range(const GridCoord& c) const { return in_range(c.x, c.y, c.z); }
  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(r_) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(r_) * static_cast<std::size_t>(z));
  }
  GridCoord coord(std::size_t idx) const {
    const auto r = static_cast<std::size_t>(r_);
    return {static_cast<int>(idx % r), static_cast<int>((idx / r) % r), static_cast<int>(idx / (r * r))};
  }
  // Out-of-range coordinates read as empty.
  bool occupied(int x, int y, int z) const { return in_range(x, y, z) && occ_[index(x, y, z)] != 0; }
  bool occupied(const GridCoord& c) const { return occupied(c.x, c.y, c.z); }
  void set(const GridCoord& c, bool value);

  std::size_t count() const;

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  int r_ = 0;
  VoxelFrame frame_;
  std::vector<std::uint8_t> occ_;
};

// Uniform scale + translation that places a mesh in the unit cube: the longest
// bounding-box axis spans [0, 1], the other axes are centered.
struct UnitCubeNormalization {
  double scale = 1.0;
  Vec3 translation;  // applied after scaling

  Vec3 apply(const Vec3& p) const { return p * scale + translation; }
  TriMesh apply(const TriMesh& m) const;
};

UnitCubeNormalization unit_cube_normalization(const TriMesh& surface);

// Normalizes `surface` to the unit cube, then expresses it in the lattice
// coordinates of `frame`. This is how a reference surface lines up with the
// tet mesh of a grid voxelized from it.
TriMesh surface_in_lattice(const TriMesh& surface, const VoxelFrame& frame);

// Generalized winding number of a closed oriented surface at p (1 inside, 0 outside).
double winding_number(const TriMesh& surface, const Vec3& p);

struct VoxelizeOptions {
  // Keep only occupied voxels with at least one empty 6-neighbour.
  bool shell = false;
  Exec exec = Exec::Parallel;
};

// Normalizes `surface` into the unit cube and marks every voxel whose center has
// winding number >= 0.5. The result uses the unit-cube frame.
VoxelGrid voxelize_mesh(const TriMesh& surface, int resolution, const VoxelizeOptions& opts = {});

// Sets every voxel in the inclusive box [lo, hi] to `value`.
VoxelGrid edit_region(const VoxelGrid& grid, const GridCoord& lo, const GridCoord& hi, bool value);

enum class CombineOp { Union, Difference, Intersection };
VoxelGrid combine(const VoxelGrid& a, const VoxelGrid& b, CombineOp op);
CombineOp parse_combine_op(const std::string& name);

// Text format:
//   voxelgrid <r>
//   frame <ox> <oy> <oz> <edge>
//   r^3 whitespace-separated 0/1 tokens, x-fastest.
void write_grid(std::ostream& out, const VoxelGrid& grid);
void write_grid(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_grid(std::istream& in);
VoxelGrid read_grid(const std::filesystem::path& path);

}  // namespace nvmg
