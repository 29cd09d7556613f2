#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvmg {

// Library-wide error type. `code` is a short machine-readable tag that the CLI
// forwards in its JSON error object.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr double squared_norm(const Vec3& a) { return dot(a, a); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
constexpr double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}
inline Vec3 min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void extend(const Vec3& p) {
    lo = nvmg::min(lo, p);
    hi = nvmg::max(hi, p);
  }
  void extend(const Aabb& b) {
    lo = nvmg::min(lo, b.lo);
    hi = nvmg::max(hi, b.hi);
  }
  bool empty() const { return lo.x > hi.x; }
  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  bool contains(const Aabb& b, double eps = 0.0) const {
    return b.lo.x >= lo.x - eps && b.lo.y >= lo.y - eps && b.lo.z >= lo.z - eps &&
           b.hi.x <= hi.x + eps && b.hi.y <= hi.y + eps && b.hi.z <= hi.z + eps;
  }
  bool overlaps(const Aabb& b) const {
    return lo.x <= b.hi.x && b.lo.x <= hi.x && lo.y <= b.hi.y && b.lo.y <= hi.y &&
           lo.z <= b.hi.z && b.lo.z <= hi.z;
  }
  // Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    double d2 = 0;
    for (int a = 0; a < 3; ++a) {
      double v = p[a];
      if (v < lo[a]) d2 += (lo[a] - v) * (lo[a] - v);
      else if (v > hi[a]) d2 += (v - hi[a]) * (v - hi[a]);
    }
    return d2;
  }
};

using Tri = std::array<int, 3>;
using Tet = std::array<int, 4>;

// Indexed triangle soup / surface mesh.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Tri> faces;

  Aabb bounds() const {
    Aabb b;
    for (const auto& v : vertices) b.extend(v);
    return b;
  }
  double area(std::size_t f) const {
    const auto& t = faces[f];
    return 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
  }
};

// Homogeneous 4x4 determinant with rows (x_i, y_i, z_i, 1); equals six times the
// signed volume under this row order.
inline double homogeneous_det(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  return dot(p0 - p3, cross(p1 - p3, p2 - p3));
}

// Gradient of homogeneous_det with respect to each of the four points.
inline std::array<Vec3, 4> homogeneous_det_gradient(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                                    const Vec3& p3) {
  const Vec3 a = p0 - p3, b = p1 - p3, c = p2 - p3;
  std::array<Vec3, 4> g{cross(b, c), cross(c, a), cross(a, b), Vec3{}};
  g[3] = -(g[0] + g[1] + g[2]);
  return g;
}

}  // namespace nvmg
