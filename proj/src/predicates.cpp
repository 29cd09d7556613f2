#include "nvmg/predicates.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace nvmg {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Shewchuk's static error bounds for the first filter stage.
constexpr double kEpsilon = 0x1.0p-53;
constexpr double kO3dErrBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;
constexpr double kCcwErrBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;

template <class T>
int sign_of(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Rational dx(d.x), dy(d.y), dz(d.z);
  const Rational adx = Rational(a.x) - dx, ady = Rational(a.y) - dy, adz = Rational(a.z) - dz;
  const Rational bdx = Rational(b.x) - dx, bdy = Rational(b.y) - dy, bdz = Rational(b.z) - dz;
  const Rational cdx = Rational(c.x) - dx, cdy = Rational(c.y) - dy, cdz = Rational(c.z) - dz;
  const Rational det = adx * (bdy * cdz - bdz * cdy) + bdx * (cdy * adz - cdz * ady) + cdx * (ady * bdz - adz * bdy);
  return sign_of(det);
}

struct Vec2 {
  double x, y;
};

Vec2 project(const Vec3& p, int drop) {
  switch (drop) {
    case 0: return {p.y, p.z};
    case 1: return {p.z, p.x};
    default: return {p.x, p.y};
  }
}

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double l = (a.x - c.x) * (b.y - c.y);
  const double r = (a.y - c.y) * (b.x - c.x);
  const double det = l - r;
  const double bound = kCcwErrBound * (std::abs(l) + std::abs(r));
  if (det > bound || -det > bound) return sign_of(det);
  // Both products have an exactly zero factor.
  if ((a.x == c.x || b.y == c.y) && (a.y == c.y || b.x == c.x)) return 0;
  const Rational cx(c.x), cy(c.y);
  const Rational e = (Rational(a.x) - cx) * (Rational(b.y) - cy) - (Rational(a.y) - cy) * (Rational(b.x) - cx);
  return sign_of(e);
}

bool on_segment_box(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
         r.y <= std::max(p.y, q.y);
}

bool segments_intersect_2d(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) {
  const int o1 = orient2d(p, q, a), o2 = orient2d(p, q, b);
  const int o3 = orient2d(a, b, p), o4 = orient2d(a, b, q);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment_box(p, q, a)) return true;
  if (o2 == 0 && on_segment_box(p, q, b)) return true;
  if (o3 == 0 && on_segment_box(a, b, p)) return true;
  if (o4 == 0 && on_segment_box(a, b, q)) return true;
  return false;
}

bool point_in_triangle_2d(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const int s0 = orient2d(a, b, p), s1 = orient2d(b, c, p), s2 = orient2d(c, a, p);
  return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

bool coplanar_segment_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  int drop = -1;
  for (int axis = 2; axis >= 0 && drop < 0; --axis)
    if (orient2d_sign(a, b, c, axis) != 0) drop = axis;
  if (drop < 0) return false;  // degenerate triangle
  const Vec2 P = project(p, drop), Q = project(q, drop);
  const Vec2 A = project(a, drop), B = project(b, drop), C = project(c, drop);
  if (point_in_triangle_2d(P, A, B, C) || point_in_triangle_2d(Q, A, B, C)) return true;
  return segments_intersect_2d(P, Q, A, B) || segments_intersect_2d(P, Q, B, C) || segments_intersect_2d(P, Q, C, A);
}

}  // namespace

int orient3d_sign(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double adx = a.x - d.x, ady = a.y - d.y, adz = a.z - d.z;
  const double bdx = b.x - d.x, bdy = b.y - d.y, bdz = b.z - d.z;
  const double cdx = c.x - d.x, cdy = c.y - d.y, cdz = c.z - d.z;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                           (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                           (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
  const double bound = kO3dErrBound * permanent;
  if (det > bound || -det > bound) return sign_of(det);
  // Every term vanishes exactly: its outer factor is zero or both of its
  // inner products have a zero factor.
  auto zero = [](double v, double w) { return v == 0 || w == 0; };
  if ((adz == 0 || (zero(bdx, cdy) && zero(cdx, bdy))) && (bdz == 0 || (zero(cdx, ady) && zero(adx, cdy))) &&
      (cdz == 0 || (zero(adx, bdy) && zero(bdx, ady))))
    return 0;
  return orient3d_exact(a, b, c, d);
}

int orient2d_sign(const Vec3& a, const Vec3& b, const Vec3& c, int drop) {
  return orient2d(project(a, drop), project(b, drop), project(c, drop));
}

bool triangle_is_degenerate(const Vec3& a, const Vec3& b, const Vec3& c) {
  return orient2d_sign(a, b, c, 0) == 0 && orient2d_sign(a, b, c, 1) == 0 && orient2d_sign(a, b, c, 2) == 0;
}

bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const int op = orient3d_sign(a, b, c, p);
  const int oq = orient3d_sign(a, b, c, q);
  if (op == 0 && oq == 0) return coplanar_segment_triangle(p, q, a, b, c);
  if (op * oq > 0) return false;
  // The line pq crosses the plane at a single point inside the segment; it is
  // in the closed triangle iff pq sees the three edges with consistent sign.
  const int s1 = orient3d_sign(p, q, a, b);
  const int s2 = orient3d_sign(p, q, b, c);
  const int s3 = orient3d_sign(p, q, c, a);
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                         const Vec3& b2) {
  if (triangle_is_degenerate(a0, a1, a2) || triangle_is_degenerate(b0, b1, b2)) return false;
  // Two closed triangles meet iff some edge of one meets the other.
  return segment_intersects_triangle(a0, a1, b0, b1, b2) || segment_intersects_triangle(a1, a2, b0, b1, b2) ||
         segment_intersects_triangle(a2, a0, b0, b1, b2) || segment_intersects_triangle(b0, b1, a0, a1, a2) ||
         segment_intersects_triangle(b1, b2, a0, a1, a2) || segment_intersects_triangle(b2, b0, a0, a1, a2);
}

}  // namespace nvmg
