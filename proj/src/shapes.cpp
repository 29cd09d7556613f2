#include "nvmg/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace nvmg {

TriMesh icosphere(int subdivisions, double radius, const Vec3& center) {
  if (subdivisions < 0) throw Error("range", "icosphere subdivisions must be >= 0");
  if (!(radius > 0)) throw Error("range", "icosphere radius must be positive");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Tri> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                        {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& p : v) p = p / norm(p);

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const Vec3 m = (v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(b)]) * 0.5;
      v.push_back(m / norm(m));
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<Tri> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& p : v) p = center + p * radius;
  return {std::move(v), std::move(f)};
}

TriMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments, const Vec3& center) {
  if (!(minor_radius > 0) || !(major_radius > minor_radius))
    throw Error("range", "torus needs 0 < minor radius < major radius");
  if (major_segments < 3 || minor_segments < 3) throw Error("range", "torus needs at least 3 segments per ring");
  TriMesh m;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < major_segments; ++i) {
    const double u = two_pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double w = two_pi * j / minor_segments;
      const double rho = major_radius + minor_radius * std::cos(w);
      m.vertices.push_back(center + Vec3{rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(w)});
    }
  }
  auto id = [&](int i, int j) { return (i % major_segments) * minor_segments + (j % minor_segments); };
  for (int i = 0; i < major_segments; ++i)
    for (int j = 0; j < minor_segments; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  return m;
}

TriMesh box(const Vec3& lo, const Vec3& hi) {
  if (!(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z)) throw Error("range", "box needs lo < hi on every axis");
  TriMesh m;
  for (int k = 0; k < 8; ++k)
    m.vertices.push_back({k & 1 ? hi.x : lo.x, k & 2 ? hi.y : lo.y, k & 4 ? hi.z : lo.z});
  m.faces = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
             {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return m;
}

TriMesh merge(const TriMesh& a, const TriMesh& b) {
  TriMesh m = a;
  const int offset = static_cast<int>(a.vertices.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& f : b.faces) m.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  return m;
}

TriMesh chair() {
  TriMesh m = box({0.15, 0.15, 0.40}, {0.85, 0.85, 0.50});
  m = merge(m, box({0.15, 0.75, 0.52}, {0.85, 0.85, 1.00}));
  for (const Vec3& p : {Vec3{0.15, 0.15, 0}, Vec3{0.75, 0.15, 0}, Vec3{0.15, 0.75, 0}, Vec3{0.75, 0.75, 0}})
    m = merge(m, box(p, p + Vec3{0.10, 0.10, 0.38}));
  return m;
}

}  // namespace nvmg
