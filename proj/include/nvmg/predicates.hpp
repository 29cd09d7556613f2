#pragma once

#include "nvmg/geometry.hpp"

namespace nvmg {

// Sign of orient3d(a, b, c, d): +1 if d lies below the plane through a, b, c
// (counter-clockwise seen from above), -1 above, 0 coplanar. Floating-point
// filter with an exact rational fallback, so the sign is always correct.
int orient3d_sign(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Sign of the 2D orientation of (a, b, c) after dropping coordinate `drop`.
int orient2d_sign(const Vec3& a, const Vec3& b, const Vec3& c, int drop);

// Closed segment/triangle intersection test (touching counts).
bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c);

// Closed triangle/triangle intersection test built on the exact predicates.
// Degenerate (collinear) triangles never report an intersection.
bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                         const Vec3& b2);

bool triangle_is_degenerate(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace nvmg
