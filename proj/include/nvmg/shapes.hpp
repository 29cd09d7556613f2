#pragma once

#include "nvmg/geometry.hpp"

namespace nvmg {

// Closed, outward-wound primitive surfaces.

// Icosahedron refined `subdivisions` times, vertices projected onto a sphere.
TriMesh icosphere(int subdivisions, double radius = 1.0, const Vec3& center = {});

// Torus around the z axis.
TriMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments,
              const Vec3& center = {});

// Axis-aligned box, two triangles per face.
TriMesh box(const Vec3& lo, const Vec3& hi);

// Appends b to a with reindexed faces. The result is a triangle soup if the
// parts overlap.
TriMesh merge(const TriMesh& a, const TriMesh& b);

// Seat, back and four legs as disjoint boxes inside the unit cube.
TriMesh chair();

}  // namespace nvmg
