#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nvmg/exec.hpp"
#include "nvmg/geometry.hpp"
#include "nvmg/rng.hpp"
#include "nvmg/tet_mesh.hpp"

namespace nvmg {

inline constexpr double kTriArHighlight = 2.6;

// Circumradius / (2 * inradius); 1 for equilateral. +inf when the area is at
// most 1e-12 * (longest edge)^2.
double triangle_ar(const Vec3& a, const Vec3& b, const Vec3& c);

// Longest edge / (2 sqrt(6) * inradius); 1 for the regular tetrahedron. Uses
// the unsigned volume; +inf when the volume is zero.
double tet_ar(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);

// Tets whose stored vertex order gives det(M) <= 0.
std::size_t count_flipped_tets(const TetMesh& mesh);

// Surface triangles whose winding normal no longer points away from the
// opposite vertex of their owning tet.
std::size_t count_flipped_triangles(const TetMesh& mesh);

// Triangles that intersect at least one triangle sharing no vertex with them.
std::size_t count_self_intersections(const TriMesh& surface, Exec exec = Exec::Parallel);
// O(n^2) all-pairs reference.
std::size_t count_self_intersections_brute(const TriMesh& surface);

// Area-weighted uniform samples on a triangle mesh.
std::vector<Vec3> sample_surface(const TriMesh& surface, std::size_t n, Rng& rng);

// Average of the mean squared nearest-neighbour distances a->b and b->a.
double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b, Exec exec = Exec::Parallel);

struct QualityReport {
  double tri_ar_mean = 0, tri_ar_min = 0, tri_ar_max = 0;
  double tet_ar_mean = 0, tet_ar_min = 0, tet_ar_max = 0;
  std::size_t tri_flip_count = 0;
  std::size_t tet_flip_count = 0;
  std::size_t self_intersection_count = 0;
  std::size_t n_tris = 0;
  std::size_t n_tets = 0;
  std::size_t tri_ar_over_threshold_count = 0;
  // Elements whose aspect ratio is +inf; excluded from the AR statistics.
  std::size_t tri_degenerate_count = 0;
  std::size_t tet_degenerate_count = 0;
};

QualityReport quality_report(const TetMesh& mesh, Exec exec = Exec::Parallel);

std::string quality_report_json(const QualityReport& r);
QualityReport quality_report_from_json(const std::string& text);

// Aggregate over many meshes: mean of means, median of mins, median of maxes,
// mean of counts.
struct BatchReport {
  std::size_t n_meshes = 0;
  double tri_ar_mean = 0, tri_ar_min = 0, tri_ar_max = 0;
  double tet_ar_mean = 0, tet_ar_min = 0, tet_ar_max = 0;
  double tri_flip = 0, tet_flip = 0, self_intersection = 0;
};

BatchReport batch_report(std::span<const QualityReport> reports);

// Aligned text table with the columns triAR | tetAR | triFlip | tetFlip | self-intersection.
void write_quality_table(std::ostream& out, std::span<const std::pair<std::string, QualityReport>> rows);
void write_batch_table(std::ostream& out, std::span<const std::pair<std::string, BatchReport>> rows);

}  // namespace nvmg
