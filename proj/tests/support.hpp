#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <vector>

#include "nvmg/geometry.hpp"
#include "nvmg/rng.hpp"
#include "nvmg/tet_mesh.hpp"
#include "nvmg/voxel_grid.hpp"

namespace nvmg::testing {

inline VoxelGrid grid_with(int r, std::initializer_list<GridCoord> cells) {
  VoxelGrid g(r);
  for (const auto& c : cells) g.set(c, true);
  return g;
}

inline VoxelGrid random_grid(int r, double fill, std::uint64_t seed) {
  Rng rng(seed);
  VoxelGrid g(r);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (uniform01(rng) < fill) g.set(g.coord(i), true);
  return g;
}

// Lattice mesh with every vertex nudged by up to `amount` in each coordinate.
inline std::vector<Vec3> jitter(std::vector<Vec3> x, double amount, Rng& rng) {
  for (auto& p : x)
    for (int a = 0; a < 3; ++a) p[a] += amount * (2.0 * uniform01(rng) - 1.0);
  return x;
}

// Central differences of f over every vertex coordinate.
inline std::vector<Vec3> fd_gradient(const std::function<double(const std::vector<Vec3>&)>& f, std::vector<Vec3> x,
                                     double h = 1e-5) {
  std::vector<Vec3> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int a = 0; a < 3; ++a) {
      const double keep = x[i][a];
      x[i][a] = keep + h;
      const double fp = f(x);
      x[i][a] = keep - h;
      const double fm = f(x);
      x[i][a] = keep;
      g[i][a] = (fp - fm) / (2.0 * h);
    }
  return g;
}

inline double relative_error(const std::vector<Vec3>& analytic, const std::vector<Vec3>& numeric) {
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += squared_distance(analytic[i], numeric[i]);
    scale = std::max({scale, squared_norm(analytic[i]), squared_norm(numeric[i])});
  }
  return std::sqrt(diff) / std::max(std::sqrt(scale), 1e-300);
}

// V - E + F of a triangle mesh, counting only referenced vertices.
inline long euler_characteristic(const TriMesh& m) {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (const auto& f : m.faces)
    for (int s = 0; s < 3; ++s) {
      verts.insert(f[static_cast<std::size_t>(s)]);
      const int a = f[static_cast<std::size_t>(s)], b = f[static_cast<std::size_t>((s + 1) % 3)];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return static_cast<long>(verts.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.faces.size());
}

// Number of triangles on each undirected edge.
inline std::map<std::pair<int, int>, int> edge_valence(const TriMesh& m) {
  std::map<std::pair<int, int>, int> val;
  for (const auto& f : m.faces)
    for (int s = 0; s < 3; ++s) {
      const int a = f[static_cast<std::size_t>(s)], b = f[static_cast<std::size_t>((s + 1) % 3)];
      ++val[{std::min(a, b), std::max(a, b)}];
    }
  return val;
}

// Signed volume of a closed outward-wound surface by the divergence theorem.
inline double enclosed_volume(const TriMesh& m) {
  double v = 0;
  for (const auto& f : m.faces)
    v += dot(m.vertices[static_cast<std::size_t>(f[0])],
             cross(m.vertices[static_cast<std::size_t>(f[1])], m.vertices[static_cast<std::size_t>(f[2])]));
  return v / 6.0;
}

}  // namespace nvmg::testing
