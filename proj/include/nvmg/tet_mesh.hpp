#pragma once

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nvmg/geometry.hpp"
#include "nvmg/voxel_grid.hpp"

namespace nvmg {

using Edge = std::pair<int, int>;  // first < second

// Tetrahedral mesh produced by splitting voxels. Positions live in lattice
// units (cube edge 1); `frame` maps them to world coordinates on export.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<Tet> tets;             // ordered so that homogeneous_det > 0 at construction
  std::vector<Tri> surface_tris;     // outward winding at construction
  std::vector<int> surface_tet;      // owning tet per surface triangle
  std::vector<int> surface_opposite; // vertex of the owning tet not on the triangle
  std::vector<std::uint8_t> surface_vertex_flags;
  std::vector<Edge> edges;           // unique, sorted
  std::vector<int> cube_of_tet;      // linear voxel index, or -1 when unknown
  VoxelFrame frame;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_tets() const { return tets.size(); }
};

// Rebuilds derived topology (surface, edges, flags) from vertices + tets.
// Surface triangles are oriented outward using the current positions.
TetMesh tet_mesh_from_elements(std::vector<Vec3> vertices, std::vector<Tet> tets, VoxelFrame frame = {});

// As above, but keeps the given surface triangles and their winding; the owning
// tet of each triangle is recovered by face lookup. Throws if a triangle is not
// a boundary face of the tet set.
TetMesh tet_mesh_with_surface(std::vector<Vec3> vertices, std::vector<Tet> tets, std::vector<Tri> surface,
                              VoxelFrame frame = {});

// Six tets per occupied voxel sharing the main diagonal (0,0,0)-(1,1,1);
// corners are merged on the integer lattice.
TetMesh build_tet_mesh(const VoxelGrid& grid);

// Local corner indices (bit 0 = x, bit 1 = y, bit 2 = z) of the six tets of a
// unit cube, each ordered for positive homogeneous determinant.
const std::array<Tet, 6>& cube_split_pattern();

struct SurfaceMesh {
  TriMesh mesh;                  // compacted surface vertices and outward triangles
  std::vector<int> to_volume;    // surface vertex -> TetMesh vertex
};
SurfaceMesh extract_surface(const TetMesh& mesh);

// Homogeneous determinant of tet `t` (six times its signed volume).
double tet_det(const TetMesh& mesh, std::size_t t);
double tet_volume(const TetMesh& mesh, std::size_t t);

// Positions mapped through mesh.frame.
std::vector<Vec3> world_vertices(const TetMesh& mesh);

// MEDIT .mesh (1-based indices; Vertices/Tetrahedra/Triangles). Coordinates are
// written in world units.
void write_medit(std::ostream& out, const TetMesh& mesh);
void write_medit(const std::filesystem::path& path, const TetMesh& mesh);
// Reads a MEDIT file. The Triangles section, when present, is taken as the
// tracked surface with its stored winding; coordinates are kept as written
// (frame = identity).
TetMesh read_medit(std::istream& in);
TetMesh read_medit(const std::filesystem::path& path);

// Legacy ASCII VTK unstructured grid (cell type 10).
void write_vtk(std::ostream& out, const TetMesh& mesh);
void write_vtk(const std::filesystem::path& path, const TetMesh& mesh);

// Surface as OBJ in world units.
void write_surface_obj(const std::filesystem::path& path, const TetMesh& mesh);

}  // namespace nvmg
