#include "nvmg/voxel_grid.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace nvmg {

namespace {

constexpr int kMaxResolution = 64;

void check_resolution(int r) {
  if (r < 1 || r > kMaxResolution)
    throw Error("resolution", "grid resolution must be in [1, 64], got " + std::to_string(r));
}

}  // namespace

VoxelGrid::VoxelGrid(int resolution) : VoxelGrid(resolution, unit_cube_frame(std::max(resolution, 1))) {}

VoxelGrid::VoxelGrid(int resolution, VoxelFrame frame) : r_(resolution), frame_(frame) {
  check_resolution(resolution);
  if (!(frame.edge > 0) || !std::isfinite(frame.edge) || !is_finite(frame.origin))
    throw Error("frame", "voxel edge length must be positive and finite");
  occ_.assign(static_cast<std::size_t>(r_) * r_ * r_, 0);
}

VoxelGrid::VoxelGrid(int resolution, VoxelFrame frame, std::vector<std::uint8_t> occupancy)
    : VoxelGrid(resolution, frame) {
  if (occupancy.size() != occ_.size())
    throw Error("payload", "occupancy length " + std::to_string(occupancy.size()) + " != r^3 = " +
                               std::to_string(occ_.size()));
  for (auto& v : occupancy) v = v ? 1 : 0;
  occ_ = std::move(occupancy);
}

void VoxelGrid::set(const GridCoord& c, bool value) {
  if (!in_range(c)) throw Error("range", "grid coordinate out of range");
  occ_[index(c.x, c.y, c.z)] = value ? 1 : 0;
}

std::size_t VoxelGrid::count() const {
  return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

TriMesh UnitCubeNormalization::apply(const TriMesh& m) const {
  TriMesh out = m;
  for (auto& v : out.vertices) v = apply(v);
  return out;
}

UnitCubeNormalization unit_cube_normalization(const TriMesh& surface) {
  if (surface.vertices.empty() || surface.faces.empty()) throw Error("empty", "surface mesh is empty");
  for (const auto& v : surface.vertices)
    if (!is_finite(v)) throw Error("non_finite", "surface mesh has non-finite vertex coordinates");
  const Aabb box = surface.bounds();
  const Vec3 ext = box.extent();
  const double longest = std::max({ext.x, ext.y, ext.z});
  if (!(longest > 0)) throw Error("degenerate", "surface bounding box is degenerate");
  UnitCubeNormalization n;
  n.scale = 1.0 / longest;
  for (int a = 0; a < 3; ++a) n.translation[a] = -box.lo[a] * n.scale + 0.5 * (1.0 - ext[a] * n.scale);
  return n;
}

TriMesh surface_in_lattice(const TriMesh& surface, const VoxelFrame& frame) {
  TriMesh m = unit_cube_normalization(surface).apply(surface);
  for (auto& v : m.vertices) v = frame.to_lattice(v);
  return m;
}

double winding_number(const TriMesh& surface, const Vec3& p) {
  double total = 0;
  for (const auto& f : surface.faces) {
    const Vec3 a = surface.vertices[f[0]] - p;
    const Vec3 b = surface.vertices[f[1]] - p;
    const Vec3 c = surface.vertices[f[2]] - p;
    const double la = norm(a), lb = norm(b), lc = norm(c);
    const double num = dot(a, cross(b, c));
    const double den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

VoxelGrid voxelize_mesh(const TriMesh& surface, int resolution, const VoxelizeOptions& opts) {
  if (resolution < 2) throw Error("resolution", "voxelization needs r >= 2");
  check_resolution(resolution);
  for (const auto& f : surface.faces)
    for (int i : f)
      if (i < 0 || i >= static_cast<int>(surface.vertices.size()))
        throw Error("format", "surface face index out of range");
  const UnitCubeNormalization norm_xf = unit_cube_normalization(surface);
  const TriMesh unit = norm_xf.apply(surface);

  const VoxelFrame frame = VoxelGrid::unit_cube_frame(resolution);
  const auto n = static_cast<std::ptrdiff_t>(resolution) * resolution * resolution;
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(n), 0);
  VoxelGrid probe(resolution, frame);

  auto classify = [&](std::ptrdiff_t i) {
    const Vec3 center = frame.voxel_center(probe.coord(static_cast<std::size_t>(i)));
    occ[static_cast<std::size_t>(i)] = winding_number(unit, center) >= 0.5 ? 1 : 0;
  };
  if (opts.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) classify(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) classify(i);
  }

  VoxelGrid solid(resolution, frame, std::move(occ));
  if (!opts.shell) return solid;

  VoxelGrid shell(resolution, frame);
  for (int z = 0; z < resolution; ++z)
    for (int y = 0; y < resolution; ++y)
      for (int x = 0; x < resolution; ++x) {
        if (!solid.occupied(x, y, z)) continue;
        const bool boundary = !solid.occupied(x - 1, y, z) || !solid.occupied(x + 1, y, z) ||
                              !solid.occupied(x, y - 1, z) || !solid.occupied(x, y + 1, z) ||
                              !solid.occupied(x, y, z - 1) || !solid.occupied(x, y, z + 1);
        if (boundary) shell.set({x, y, z}, true);
      }
  return shell;
}

VoxelGrid edit_region(const VoxelGrid& grid, const GridCoord& lo, const GridCoord& hi, bool value) {
  if (!grid.in_range(lo) || !grid.in_range(hi)) throw Error("range", "edit region coordinates out of range");
  if (lo.x > hi.x || lo.y > hi.y || lo.z > hi.z) throw Error("range", "edit region has lo > hi");
  VoxelGrid out = grid;
  for (int z = lo.z; z <= hi.z; ++z)
    for (int y = lo.y; y <= hi.y; ++y)
      for (int x = lo.x; x <= hi.x; ++x) out.set({x, y, z}, value);
  return out;
}

VoxelGrid combine(const VoxelGrid& a, const VoxelGrid& b, CombineOp op) {
  if (a.resolution() != b.resolution()) throw Error("mismatch", "combine: resolutions differ");
  if (!(a.frame() == b.frame())) throw Error("mismatch", "combine: frames differ");
  std::vector<std::uint8_t> occ(a.size());
  const auto& oa = a.occupancy();
  const auto& ob = b.occupancy();
  for (std::size_t i = 0; i < occ.size(); ++i) {
    switch (op) {
      case CombineOp::Union: occ[i] = oa[i] | ob[i]; break;
      case CombineOp::Difference: occ[i] = oa[i] & static_cast<std::uint8_t>(!ob[i]); break;
      case CombineOp::Intersection: occ[i] = oa[i] & ob[i]; break;
    }
  }
  return VoxelGrid(a.resolution(), a.frame(), std::move(occ));
}

CombineOp parse_combine_op(const std::string& name) {
  if (name == "union") return CombineOp::Union;
  if (name == "difference") return CombineOp::Difference;
  if (name == "intersection") return CombineOp::Intersection;
  throw Error("usage", "unknown combine op '" + name + "'");
}

void write_grid(std::ostream& out, const VoxelGrid& grid) {
  const int r = grid.resolution();
  out << "voxelgrid " << r << '\n';
  out << std::setprecision(17) << "frame " << grid.frame().origin.x << ' ' << grid.frame().origin.y << ' '
      << grid.frame().origin.z << ' ' << grid.frame().edge << '\n';
  const auto& occ = grid.occupancy();
  for (std::size_t row = 0; row < occ.size() / static_cast<std::size_t>(r); ++row) {
    for (int x = 0; x < r; ++x) {
      if (x) out << ' ';
      out << static_cast<int>(occ[row * static_cast<std::size_t>(r) + static_cast<std::size_t>(x)]);
    }
    out << '\n';
  }
}

void write_grid(const std::filesystem::path& path, const VoxelGrid& grid) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  write_grid(out, grid);
}

VoxelGrid read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("format", "voxel file: missing header");
  std::istringstream h1(line);
  std::string tag;
  long r = 0;
  std::string extra;
  if (!(h1 >> tag >> r) || tag != "voxelgrid" || (h1 >> extra))
    throw Error("format", "voxel file: malformed header line '" + line + "'");
  if (r < 1 || r > kMaxResolution) throw Error("format", "voxel file: resolution out of range");

  if (!std::getline(in, line)) throw Error("format", "voxel file: missing frame line");
  std::istringstream h2(line);
  VoxelFrame frame;
  if (!(h2 >> tag >> frame.origin.x >> frame.origin.y >> frame.origin.z >> frame.edge) || tag != "frame" ||
      (h2 >> extra))
    throw Error("format", "voxel file: malformed frame line '" + line + "'");
  if (!(frame.edge > 0)) throw Error("format", "voxel file: voxel edge must be positive");

  const std::size_t expected = static_cast<std::size_t>(r) * r * r;
  std::vector<std::uint8_t> occ;
  occ.reserve(expected);
  std::string tok;
  while (in >> tok) {
    if (tok == "0") occ.push_back(0);
    else if (tok == "1") occ.push_back(1);
    else throw Error("format", "voxel file: invalid token '" + tok + "'");
  }
  if (occ.size() != expected)
    throw Error("payload", "voxel file: expected " + std::to_string(expected) + " values, got " +
                               std::to_string(occ.size()));
  return VoxelGrid(static_cast<int>(r), frame, std::move(occ));
}

VoxelGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_grid(in);
}

}  // namespace nvmg
