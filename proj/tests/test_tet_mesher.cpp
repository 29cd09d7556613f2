#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "nvmg/shapes.hpp"
#include "nvmg/tet_mesh.hpp"
#include "support.hpp"

using namespace nvmg;
using namespace nvmg::testing;

namespace {

using Face = std::array<int, 3>;

Face sorted_face(int a, int b, int c) {
  Face f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

std::map<Face, int> face_counts(const TetMesh& m) {
  std::map<Face, int> count;
  for (const auto& t : m.tets) {
    ++count[sorted_face(t[1], t[2], t[3])];
    ++count[sorted_face(t[0], t[2], t[3])];
    ++count[sorted_face(t[0], t[1], t[3])];
    ++count[sorted_face(t[0], t[1], t[2])];
  }
  return count;
}

// Quad faces of occupied voxels that border an empty (or out-of-range) cell.
std::size_t exposed_quads(const VoxelGrid& g) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const GridCoord c = g.coord(i);
    if (!g.occupied(c)) continue;
    const int d[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (const auto& o : d) n += g.occupied(c.x + o[0], c.y + o[1], c.z + o[2]) ? 0 : 1;
  }
  return n;
}

}  // namespace

TEST_CASE("single voxel mesh counts") {
  const TetMesh m = build_tet_mesh(grid_with(3, {{1, 1, 1}}));
  CHECK(m.num_vertices() == 8);
  CHECK(m.num_tets() == 6);
  CHECK(m.surface_tris.size() == 12);
  CHECK(m.edges.size() == 19);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(tet_det(m, t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tet_volume(m, t) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  }
  std::size_t unit = 0, diag = 0, main_diag = 0;
  for (const auto& [a, b] : m.edges) {
    const double l2 = squared_distance(m.vertices[static_cast<std::size_t>(a)], m.vertices[static_cast<std::size_t>(b)]);
    unit += l2 == 1.0;
    diag += l2 == 2.0;
    main_diag += l2 == 3.0;
  }
  CHECK(unit == 12);
  CHECK(diag == 6);
  CHECK(main_diag == 1);
  for (std::uint8_t flag : m.surface_vertex_flags) CHECK(flag == 1);
}

TEST_CASE("split pattern shares the main diagonal and has positive determinants") {
  const auto& pattern = cube_split_pattern();
  auto corner = [](int id) { return Vec3{static_cast<double>(id & 1), static_cast<double>((id >> 1) & 1), static_cast<double>((id >> 2) & 1)}; };
  for (const auto& t : pattern) {
    CHECK(t[0] == 0);
    CHECK(t[3] == 7);
    CHECK(homogeneous_det(corner(t[0]), corner(t[1]), corner(t[2]), corner(t[3])) == 1.0);
  }
}

TEST_CASE("two face-adjacent voxels") {
  const TetMesh m = build_tet_mesh(grid_with(4, {{1, 1, 1}, {2, 1, 1}}));
  CHECK(m.num_vertices() == 12);
  CHECK(m.num_tets() == 12);
  CHECK(m.surface_tris.size() == 20);
  CHECK(euler_characteristic(extract_surface(m).mesh) == 2);
}

TEST_CASE("surface Euler characteristics") {
  const SurfaceMesh cube = extract_surface(build_tet_mesh(grid_with(2, {{0, 0, 0}})));
  CHECK(cube.mesh.faces.size() == 12);
  CHECK(cube.mesh.vertices.size() == 8);
  CHECK(euler_characteristic(cube.mesh) == 2);

  const SurfaceMesh bar = extract_surface(build_tet_mesh(grid_with(2, {{0, 0, 0}, {1, 0, 0}})));
  CHECK(bar.mesh.faces.size() == 20);
  CHECK(euler_characteristic(bar.mesh) == 2);

  const VoxelGrid tg = voxelize_mesh(torus(0.35, 0.1, 64, 24), 16);
  const SurfaceMesh ts = extract_surface(build_tet_mesh(tg));
  CHECK(euler_characteristic(ts.mesh) == 0);
}

TEST_CASE("extracted surface maps back to volume vertices") {
  const TetMesh m = build_tet_mesh(random_grid(5, 0.5, 3));
  const SurfaceMesh s = extract_surface(m);
  REQUIRE(s.mesh.faces.size() == m.surface_tris.size());
  for (std::size_t f = 0; f < s.mesh.faces.size(); ++f)
    for (int k = 0; k < 3; ++k) {
      const int sv = s.mesh.faces[f][static_cast<std::size_t>(k)];
      CHECK(s.to_volume[static_cast<std::size_t>(sv)] == m.surface_tris[f][static_cast<std::size_t>(k)]);
      CHECK(s.mesh.vertices[static_cast<std::size_t>(sv)] ==
            m.vertices[static_cast<std::size_t>(m.surface_tris[f][static_cast<std::size_t>(k)])]);
    }
}

TEST_CASE("tet_det examples") {
  TetMesh m = build_tet_mesh(grid_with(2, {{0, 0, 0}}));
  std::swap(m.tets[2][1], m.tets[2][2]);
  CHECK(tet_det(m, 2) == -1.0);
  m.tets[3][1] = m.tets[3][0];
  CHECK(tet_det(m, 3) == 0.0);
  CHECK_THROWS_AS(tet_det(m, 6), Error);
}

TEST_CASE("empty grid is rejected") { CHECK_THROWS_AS(build_tet_mesh(VoxelGrid(3)), Error); }

TEST_CASE("mesh invariants on random grids") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const VoxelGrid g = random_grid(2 + static_cast<int>(seed % 6), 0.55, seed);
    if (g.count() == 0) continue;
    const TetMesh m = build_tet_mesh(g);
    CAPTURE(seed);

    CHECK(m.num_tets() == 6 * g.count());

    double volume = 0, min_det = 1e300;
    for (std::size_t t = 0; t < m.num_tets(); ++t) {
      volume += tet_volume(m, t);
      min_det = std::min(min_det, tet_det(m, t));
    }
    CHECK(std::abs(volume - static_cast<double>(g.count())) / static_cast<double>(g.count()) < 1e-12);
    CHECK(min_det == 1.0);

    // Each tet face is shared by at most two tets; boundary faces are exactly
    // the tracked surface, two triangles per exposed quad (no hanging diagonals).
    const auto counts = face_counts(m);
    std::set<Face> boundary;
    for (const auto& [f, c] : counts) {
      CHECK(c <= 2);
      if (c == 1) boundary.insert(f);
    }
    std::set<Face> surface;
    for (const auto& t : m.surface_tris) surface.insert(sorted_face(t[0], t[1], t[2]));
    CHECK(surface == boundary);
    CHECK(m.surface_tris.size() == 2 * exposed_quads(g));

    // Outward winding relative to the owning tet, and the enclosed volume
    // equals the voxel count.
    for (std::size_t f = 0; f < m.surface_tris.size(); ++f) {
      const auto& t = m.surface_tris[f];
      const Vec3& a = m.vertices[static_cast<std::size_t>(t[0])];
      const Vec3& b = m.vertices[static_cast<std::size_t>(t[1])];
      const Vec3& c = m.vertices[static_cast<std::size_t>(t[2])];
      const Vec3& d = m.vertices[static_cast<std::size_t>(m.surface_opposite[f])];
      CHECK(dot(cross(b - a, c - a), (a + b + c) / 3.0 - d) > 0);
    }
    CHECK(enclosed_volume(extract_surface(m).mesh) == doctest::Approx(static_cast<double>(g.count())));

    // Closed surface: every edge used twice overall (a vertex-pinched edge
    // between two voxels touching along an edge is used four times).
    for (const auto& [e, n] : edge_valence(extract_surface(m).mesh)) CHECK(n % 2 == 0);

    // Edges are unique and sorted.
    for (std::size_t i = 1; i < m.edges.size(); ++i) CHECK(m.edges[i - 1] < m.edges[i]);
  }
}

TEST_CASE("adjacent cubes split their shared face by the same diagonal") {
  const TetMesh m = build_tet_mesh(grid_with(2, {{0, 0, 0}, {1, 0, 0}}));
  // Shared quad x = 1: both cubes contribute the same two triangles.
  std::map<Face, int> on_plane;
  for (const auto& [f, c] : face_counts(m)) {
    bool all = true;
    for (int v : f) all = all && m.vertices[static_cast<std::size_t>(v)].x == 1.0;
    if (all) on_plane[f] = c;
  }
  CHECK(on_plane.size() == 2);
  for (const auto& [f, c] : on_plane) CHECK(c == 2);
}

TEST_CASE("lattice vertices are merged exactly") {
  const VoxelGrid g = random_grid(6, 1.0, 0);
  const TetMesh m = build_tet_mesh(g);
  CHECK(m.num_vertices() == 7 * 7 * 7);
  std::set<std::array<double, 3>> unique;
  for (const auto& v : m.vertices) unique.insert({v.x, v.y, v.z});
  CHECK(unique.size() == m.num_vertices());
}

TEST_CASE("MEDIT round trip keeps elements and surface") {
  VoxelGrid g(3, VoxelFrame{{0.25, -1.0, 2.0}, 0.125}, random_grid(3, 0.6, 9).occupancy());
  const TetMesh m = build_tet_mesh(g);
  std::stringstream ss;
  write_medit(ss, m);
  const std::string text = ss.str();
  CHECK(text.rfind("MeshVersionFormatted 2", 0) == 0);
  CHECK(text.find("Tetrahedra\n" + std::to_string(m.num_tets())) != std::string::npos);
  const TetMesh r = read_medit(ss);
  REQUIRE(r.num_vertices() == m.num_vertices());
  CHECK(r.tets == m.tets);
  CHECK(r.surface_tris == m.surface_tris);
  const auto world = world_vertices(m);
  for (std::size_t i = 0; i < world.size(); ++i) CHECK(r.vertices[i] == world[i]);
  for (std::size_t t = 0; t < r.num_tets(); ++t) CHECK(tet_det(r, t) > 0);
}

TEST_CASE("VTK output lists points and tetra cells") {
  const TetMesh m = build_tet_mesh(grid_with(2, {{0, 0, 0}}));
  std::stringstream ss;
  write_vtk(ss, m);
  const std::string s = ss.str();
  CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(s.find("POINTS 8 double") != std::string::npos);
  CHECK(s.find("CELLS 6 30") != std::string::npos);
  CHECK(s.find("CELL_TYPES 6") != std::string::npos);
}
