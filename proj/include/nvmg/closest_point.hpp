#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nvmg/exec.hpp"
#include "nvmg/geometry.hpp"
#include "nvmg/tet_mesh.hpp"
#include "nvmg/voxel_grid.hpp"

namespace nvmg {

// Closest point to p on triangle abc. Degenerate triangles fall back to the
// closest point on their three edges.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct ClosestPointResult {
  Vec3 point;
  double squared_distance = 0;
  int triangle = -1;

  double distance() const { return std::sqrt(squared_distance); }
};

// Static median-split AABB tree over a triangle surface; leaves hold at most
// kLeafSize triangles.
class TriangleBvh {
 public:
  static constexpr int kLeafSize = 4;

  struct Node {
    Aabb box;
    int left = -1;   // child node index, -1 for leaves
    int right = -1;
    int first = 0;   // leaf: range into order()
    int count = 0;
    bool leaf() const { return left < 0; }
  };

  explicit TriangleBvh(const TriMesh& surface);

  // Exact closest point; ties go to the lowest triangle index. When
  // `node_visits` is non-null it is incremented once per visited node.
  ClosestPointResult closest_point(const Vec3& x, std::uint64_t* node_visits = nullptr) const;

  void closest_points(std::span<const Vec3> queries, std::span<ClosestPointResult> out,
                      Exec exec = Exec::Parallel) const;

  // Linear scan over all triangles with the same tie rule, for testing.
  ClosestPointResult brute_force(const Vec3& x) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& order() const { return order_; }
  const TriMesh& surface() const { return surface_; }
  std::size_t num_triangles() const { return surface_.faces.size(); }
  Aabb triangle_box(int t) const;

 private:
  int build(int first, int count);

  TriMesh surface_;
  std::vector<std::array<Vec3, 3>> tri_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// Contract satisfied by anything that maps a query point to a closest-point
// estimate, conditioned on a voxel grid. Learned predictors use the grid; the
// exact oracle ignores it.
class ClosestPointPredictor {
 public:
  virtual ~ClosestPointPredictor() = default;
  virtual Vec3 predict(const VoxelGrid& grid, const Vec3& x) const = 0;
  virtual void predict_batch(const VoxelGrid& grid, std::span<const Vec3> queries, std::span<Vec3> out,
                             Exec exec = Exec::Parallel) const;
};

class ExactClosestPoint final : public ClosestPointPredictor {
 public:
  explicit ExactClosestPoint(std::shared_ptr<const TriangleBvh> bvh) : bvh_(std::move(bvh)) {}
  Vec3 predict(const VoxelGrid& grid, const Vec3& x) const override;
  void predict_batch(const VoxelGrid& grid, std::span<const Vec3> queries, std::span<Vec3> out,
                     Exec exec = Exec::Parallel) const override;
  const TriangleBvh& bvh() const { return *bvh_; }

 private:
  std::shared_ptr<const TriangleBvh> bvh_;
};

struct CpSample {
  Vec3 query;
  Vec3 target;
};

struct SampleOptions {
  double jitter_sigma = 0.5;
  std::uint64_t seed = 0;
  std::optional<double> fixed_alpha;  // overrides the Uniform[0,1] draw
  Exec exec = Exec::Parallel;
};

// Draws `n` queries around the segments joining each surface vertex of `mesh`
// to its closest point on the bvh surface, each labelled with its exact
// closest point. Work is split into fixed-size chunks with derived seeds, so
// the output does not depend on the thread count.
std::vector<CpSample> gen_training_samples(const TetMesh& mesh, const TriangleBvh& bvh, std::size_t n,
                                           const SampleOptions& opts = {});

// Binary sample file: 8-byte magic "NVMGCPS1" followed by records of six
// little-endian float64 values (query xyz, target xyz).
void write_samples(std::ostream& out, std::span<const CpSample> samples);
void write_samples(const std::filesystem::path& path, std::span<const CpSample> samples);
std::vector<CpSample> read_samples(std::istream& in);
std::vector<CpSample> read_samples(const std::filesystem::path& path);

}  // namespace nvmg
