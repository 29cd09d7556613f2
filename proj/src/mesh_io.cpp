#include "nvmg/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nvmg {

namespace {

int parse_obj_index(const std::string& token, std::size_t n_vertices) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw Error("format", "obj: bad face index '" + token + "'");
  }
  // Negative indices are relative to the current end of the vertex list.
  if (idx < 0) idx = static_cast<int>(n_vertices) + idx + 1;
  if (idx < 1 || idx > static_cast<int>(n_vertices))
    throw Error("format", "obj: face index out of range '" + token + "'");
  return idx - 1;
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  throw Error("format", "off: unexpected end of file");
}

}  // namespace

TriMesh read_obj(std::istream& in) {
  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw Error("format", "obj: malformed vertex line: " + line);
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) poly.push_back(parse_obj_index(tok, mesh.vertices.size()));
      if (poly.size() < 3) throw Error("format", "obj: face with fewer than 3 vertices");
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
    }
  }
  return mesh;
}

TriMesh read_off(std::istream& in) {
  std::istringstream header(next_data_line(in));
  std::string magic;
  header >> magic;
  if (magic != "OFF") throw Error("format", "off: missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv)) {
    std::istringstream counts(next_data_line(in));
    counts >> nv >> nf >> ne;
  } else {
    header >> nf >> ne;
  }
  if (nv < 0 || nf < 0) throw Error("format", "off: bad element counts");
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    std::istringstream ls(next_data_line(in));
    Vec3 p;
    if (!(ls >> p.x >> p.y >> p.z)) throw Error("format", "off: malformed vertex");
    mesh.vertices.push_back(p);
  }
  for (long i = 0; i < nf; ++i) {
    std::istringstream ls(next_data_line(in));
    int k = 0;
    if (!(ls >> k) || k < 3) throw Error("format", "off: malformed face");
    std::vector<int> poly(static_cast<std::size_t>(k));
    for (auto& idx : poly) {
      if (!(ls >> idx) || idx < 0 || idx >= nv) throw Error("format", "off: face index out of range");
    }
    for (int j = 1; j + 1 < k; ++j) mesh.faces.push_back({poly[0], poly[j], poly[j + 1]});
  }
  return mesh;
}

TriMesh read_surface(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  const auto ext = path.extension().string();
  TriMesh mesh;
  if (ext == ".off" || ext == ".OFF") mesh = read_off(in);
  else if (ext == ".obj" || ext == ".OBJ") mesh = read_obj(in);
  else throw Error("format", "unsupported surface extension '" + ext + "'");
  validate_surface(mesh);
  return mesh;
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  write_obj(out, mesh);
}

void validate_surface(const TriMesh& mesh) {
  if (mesh.vertices.empty() || mesh.faces.empty()) throw Error("empty", "surface mesh is empty");
  for (const auto& v : mesh.vertices)
    if (!is_finite(v)) throw Error("non_finite", "surface mesh has non-finite vertex coordinates");
  const int n = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces)
    for (int i : f)
      if (i < 0 || i >= n) throw Error("format", "surface face index out of range");
}

}  // namespace nvmg
