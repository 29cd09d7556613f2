#include "nvmg/tet_mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nvmg/mesh_io.hpp"

namespace nvmg {

namespace {

// Local faces of a tet; entry i is the face opposite vertex i.
constexpr int kTetFace[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

using FaceKey = std::array<int, 3>;

FaceKey sorted_key(int a, int b, int c) {
  FaceKey k{a, b, c};
  std::sort(k.begin(), k.end());
  return k;
}

struct FaceRecord {
  FaceKey key;
  int tet;
  int local;
};

// All 4T tet faces sorted by vertex set; runs of length 1 are boundary faces.
std::vector<FaceRecord> sorted_faces(const std::vector<Tet>& tets) {
  std::vector<FaceRecord> faces;
  faces.reserve(tets.size() * 4);
  for (std::size_t t = 0; t < tets.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      const auto& T = tets[t];
      faces.push_back({sorted_key(T[kTetFace[f][0]], T[kTetFace[f][1]], T[kTetFace[f][2]]),
                       static_cast<int>(t), f});
    }
  std::sort(faces.begin(), faces.end(), [](const FaceRecord& a, const FaceRecord& b) {
    return a.key != b.key ? a.key < b.key : (a.tet != b.tet ? a.tet < b.tet : a.local < b.local);
  });
  return faces;
}

void fill_edges_and_flags(TetMesh& m) {
  m.edges.clear();
  m.edges.reserve(m.tets.size() * 6);
  for (const auto& t : m.tets)
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) m.edges.emplace_back(std::min(t[i], t[j]), std::max(t[i], t[j]));
  std::sort(m.edges.begin(), m.edges.end());
  m.edges.erase(std::unique(m.edges.begin(), m.edges.end()), m.edges.end());

  m.surface_vertex_flags.assign(m.vertices.size(), 0);
  for (const auto& tri : m.surface_tris)
    for (int v : tri) m.surface_vertex_flags[static_cast<std::size_t>(v)] = 1;
}

void validate_elements(const std::vector<Vec3>& vertices, const std::vector<Tet>& tets) {
  const int n = static_cast<int>(vertices.size());
  for (const auto& t : tets)
    for (int v : t)
      if (v < 0 || v >= n) throw Error("format", "tet vertex index out of range");
}

}  // namespace

const std::array<Tet, 6>& cube_split_pattern() {
  // Corner id = x + 2y + 4z. All six tets contain corners 0 and 7.
  static const std::array<Tet, 6> pattern{{
      {0, 3, 1, 7},
      {0, 2, 3, 7},
      {0, 6, 2, 7},
      {0, 4, 6, 7},
      {0, 5, 4, 7},
      {0, 1, 5, 7},
  }};
  return pattern;
}

TetMesh tet_mesh_from_elements(std::vector<Vec3> vertices, std::vector<Tet> tets, VoxelFrame frame) {
  validate_elements(vertices, tets);
  TetMesh m;
  m.vertices = std::move(vertices);
  m.tets = std::move(tets);
  m.frame = frame;
  m.cube_of_tet.assign(m.tets.size(), -1);

  const auto faces = sorted_faces(m.tets);
  std::vector<std::uint8_t> boundary(m.tets.size() * 4, 0);
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i + 1;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    if (j - i == 1) boundary[static_cast<std::size_t>(faces[i].tet) * 4 + static_cast<std::size_t>(faces[i].local)] = 1;
    i = j;
  }

  for (std::size_t t = 0; t < m.tets.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      if (!boundary[t * 4 + static_cast<std::size_t>(f)]) continue;
      const auto& T = m.tets[t];
      Tri tri{T[kTetFace[f][0]], T[kTetFace[f][1]], T[kTetFace[f][2]]};
      const int opp = T[f];
      const Vec3& a = m.vertices[tri[0]];
      const Vec3 n = cross(m.vertices[tri[1]] - a, m.vertices[tri[2]] - a);
      const Vec3 centroid = (a + m.vertices[tri[1]] + m.vertices[tri[2]]) / 3.0;
      if (dot(n, centroid - m.vertices[opp]) < 0) std::swap(tri[1], tri[2]);
      m.surface_tris.push_back(tri);
      m.surface_tet.push_back(static_cast<int>(t));
      m.surface_opposite.push_back(opp);
    }
  fill_edges_and_flags(m);
  return m;
}

TetMesh tet_mesh_with_surface(std::vector<Vec3> vertices, std::vector<Tet> tets, std::vector<Tri> surface,
                              VoxelFrame frame) {
  validate_elements(vertices, tets);
  const auto faces = sorted_faces(tets);
  TetMesh m;
  m.vertices = std::move(vertices);
  m.tets = std::move(tets);
  m.frame = frame;
  m.cube_of_tet.assign(m.tets.size(), -1);
  m.surface_tris = std::move(surface);
  for (const auto& tri : m.surface_tris) {
    const FaceKey key = sorted_key(tri[0], tri[1], tri[2]);
    auto lo = std::lower_bound(faces.begin(), faces.end(), key,
                               [](const FaceRecord& r, const FaceKey& k) { return r.key < k; });
    auto hi = lo;
    while (hi != faces.end() && hi->key == key) ++hi;
    if (hi - lo != 1) throw Error("format", "surface triangle is not a boundary face of the tet mesh");
    m.surface_tet.push_back(lo->tet);
    m.surface_opposite.push_back(m.tets[static_cast<std::size_t>(lo->tet)][static_cast<std::size_t>(lo->local)]);
  }
  fill_edges_and_flags(m);
  return m;
}

TetMesh build_tet_mesh(const VoxelGrid& grid) {
  if (grid.count() == 0) throw Error("empty", "cannot build a tet mesh from an empty grid");
  const int r = grid.resolution();
  const int rl = r + 1;
  std::vector<int> lattice_id(static_cast<std::size_t>(rl) * rl * rl, -1);
  std::vector<Vec3> vertices;
  std::vector<Tet> tets;
  std::vector<int> cube_of_tet;
  tets.reserve(grid.count() * 6);

  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (!grid.occupancy()[c]) continue;
    const GridCoord g = grid.coord(c);
    std::array<int, 8> corner{};
    for (int k = 0; k < 8; ++k) {
      const int x = g.x + (k & 1), y = g.y + ((k >> 1) & 1), z = g.z + ((k >> 2) & 1);
      int& id = lattice_id[static_cast<std::size_t>(x + rl * (y + rl * z))];
      if (id < 0) {
        id = static_cast<int>(vertices.size());
        vertices.push_back({static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)});
      }
      corner[static_cast<std::size_t>(k)] = id;
    }
    for (const auto& p : cube_split_pattern()) {
      tets.push_back({corner[p[0]], corner[p[1]], corner[p[2]], corner[p[3]]});
      cube_of_tet.push_back(static_cast<int>(c));
    }
  }
  TetMesh m = tet_mesh_from_elements(std::move(vertices), std::move(tets), grid.frame());
  m.cube_of_tet = std::move(cube_of_tet);
  return m;
}

SurfaceMesh extract_surface(const TetMesh& mesh) {
  SurfaceMesh s;
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!mesh.surface_vertex_flags[v]) continue;
    remap[v] = static_cast<int>(s.to_volume.size());
    s.to_volume.push_back(static_cast<int>(v));
    s.mesh.vertices.push_back(mesh.vertices[v]);
  }
  s.mesh.faces.reserve(mesh.surface_tris.size());
  for (const auto& t : mesh.surface_tris) s.mesh.faces.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  return s;
}

double tet_det(const TetMesh& mesh, std::size_t t) {
  if (t >= mesh.tets.size()) throw Error("range", "tet index out of range");
  const auto& T = mesh.tets[t];
  return homogeneous_det(mesh.vertices[T[0]], mesh.vertices[T[1]], mesh.vertices[T[2]], mesh.vertices[T[3]]);
}

double tet_volume(const TetMesh& mesh, std::size_t t) { return tet_det(mesh, t) / 6.0; }

std::vector<Vec3> world_vertices(const TetMesh& mesh) {
  std::vector<Vec3> out;
  out.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.push_back(mesh.frame.to_world(v));
  return out;
}

void write_medit(std::ostream& out, const TetMesh& mesh) {
  out << "MeshVersionFormatted 2\nDimension 3\n\nVertices\n" << mesh.vertices.size() << '\n';
  out << std::setprecision(17);
  for (const auto& v : world_vertices(mesh)) out << v.x << ' ' << v.y << ' ' << v.z << " 0\n";
  out << "\nTetrahedra\n" << mesh.tets.size() << '\n';
  for (const auto& t : mesh.tets) out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' ' << t[3] + 1 << " 0\n";
  out << "\nTriangles\n" << mesh.surface_tris.size() << '\n';
  for (const auto& t : mesh.surface_tris) out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << " 0\n";
  out << "\nEnd\n";
}

void write_medit(const std::filesystem::path& path, const TetMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  write_medit(out, mesh);
}

TetMesh read_medit(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Tet> tets;
  std::vector<Tri> tris;
  bool have_tris = false;
  std::string tok;
  auto read_count = [&](const char* what) {
    long n = -1;
    if (!(in >> n) || n < 0) throw Error("format", std::string("medit: bad count for ") + what);
    return n;
  };
  while (in >> tok) {
    if (tok == "End") break;
    if (tok == "MeshVersionFormatted") {
      in >> tok;
    } else if (tok == "Dimension") {
      int d = 0;
      if (!(in >> d) || d != 3) throw Error("format", "medit: only Dimension 3 is supported");
    } else if (tok == "Vertices") {
      const long n = read_count("Vertices");
      vertices.resize(static_cast<std::size_t>(n));
      for (auto& v : vertices) {
        int ref = 0;
        if (!(in >> v.x >> v.y >> v.z >> ref)) throw Error("format", "medit: malformed vertex");
      }
    } else if (tok == "Tetrahedra") {
      const long n = read_count("Tetrahedra");
      tets.resize(static_cast<std::size_t>(n));
      for (auto& t : tets) {
        int ref = 0;
        if (!(in >> t[0] >> t[1] >> t[2] >> t[3] >> ref)) throw Error("format", "medit: malformed tetrahedron");
        for (auto& i : t) --i;
      }
    } else if (tok == "Triangles") {
      const long n = read_count("Triangles");
      tris.resize(static_cast<std::size_t>(n));
      for (auto& t : tris) {
        int ref = 0;
        if (!(in >> t[0] >> t[1] >> t[2] >> ref)) throw Error("format", "medit: malformed triangle");
        for (auto& i : t) --i;
      }
      have_tris = true;
    } else {
      throw Error("format", "medit: unsupported section '" + tok + "'");
    }
  }
  if (tets.empty()) throw Error("format", "medit: no tetrahedra");
  for (const auto& v : vertices)
    if (!is_finite(v)) throw Error("non_finite", "medit: non-finite vertex");
  const int n = static_cast<int>(vertices.size());
  for (const auto& t : tris)
    for (int v : t)
      if (v < 0 || v >= n) throw Error("format", "medit: triangle index out of range");
  if (have_tris) return tet_mesh_with_surface(std::move(vertices), std::move(tets), std::move(tris));
  return tet_mesh_from_elements(std::move(vertices), std::move(tets));
}

TetMesh read_medit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_medit(in);
}

void write_vtk(std::ostream& out, const TetMesh& mesh) {
  out << "# vtk DataFile Version 3.0\nnvmg tetrahedral mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n" << std::setprecision(17);
  for (const auto& v : world_vertices(mesh)) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
  out << "CELLS " << mesh.tets.size() << ' ' << mesh.tets.size() * 5 << '\n';
  for (const auto& t : mesh.tets) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << mesh.tets.size() << '\n';
  for (std::size_t i = 0; i < mesh.tets.size(); ++i) out << "10\n";
}

void write_vtk(const std::filesystem::path& path, const TetMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  write_vtk(out, mesh);
}

void write_surface_obj(const std::filesystem::path& path, const TetMesh& mesh) {
  SurfaceMesh s = extract_surface(mesh);
  for (auto& v : s.mesh.vertices) v = mesh.frame.to_world(v);
  write_obj(path, s.mesh);
}

}  // namespace nvmg
