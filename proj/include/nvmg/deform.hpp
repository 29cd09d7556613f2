#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nvmg/closest_point.hpp"
#include "nvmg/exec.hpp"
#include "nvmg/tet_mesh.hpp"
#include "nvmg/voxel_grid.hpp"

namespace nvmg {

struct DeformConfig {
  int steps = 80;
  // Smoothness weights on the edge, Laplacian and normal-consistency terms.
  double lambda_a = 0.01;
  double lambda_b = 0.5;
  double lambda_c = 0.1;
  double laplacian_alpha = 1.0;  // volume-graph weight
  double laplacian_beta = 0.5;   // surface-graph weight
  double v0 = 0.01;              // orientation barrier threshold on det(M)
  double k0 = 0.1;               // initial projection noise coefficient
  double noise_decay = 0.5;      // k <- k * noise_decay every noise_period steps
  int noise_period = 10;
  double step_size = 0.05;       // Adam learning rate, lattice units
  std::uint64_t seed = 0;
  // Orientation term plus rejection of steps that create a non-positive det(M).
  bool use_barrier = true;
  int max_halvings = 20;

  void validate() const;
  // k at optimizer step `step` (0-based).
  double noise_at(int step) const;
};

DeformConfig load_deform_config(const std::filesystem::path& path);
DeformConfig deform_config_from_json(const std::string& text);
std::string deform_config_to_json(const DeformConfig& cfg);

// Raw (unweighted) term values; total applies the lambdas.
struct ObjectiveBreakdown {
  double total = 0;
  double proj = 0;
  double edge = 0;
  double laplacian = 0;
  double normal = 0;
  double orientation = 0;
};

// Adjacency tables shared by all objective kernels. Built once per mesh.
class MeshTopology {
 public:
  explicit MeshTopology(const TetMesh& mesh);

  std::size_t num_vertices() const { return n_vertices_; }
  std::size_t num_tets() const { return tets_.size(); }
  const std::vector<Tet>& tets() const { return tets_; }
  const std::vector<Tri>& surface_tris() const { return tris_; }
  const std::vector<int>& surface_vertices() const { return surface_vertices_; }
  // Pairs of surface triangles sharing a manifold edge.
  const std::vector<std::pair<int, int>>& face_pairs() const { return face_pairs_; }
  std::size_t non_manifold_edges() const { return non_manifold_edges_; }

  // CSR views.
  std::span<const int> neighbors(std::size_t v) const { return row(nbr_off_, nbr_, v); }
  std::span<const int> surface_neighbors(std::size_t v) const { return row(snbr_off_, snbr_, v); }
  std::span<const int> incident_tet_slots(std::size_t v) const { return row(vt_off_, vt_, v); }
  std::span<const int> incident_face_slots(std::size_t v) const { return row(vf_off_, vf_, v); }
  std::span<const int> face_pair_ids(std::size_t f) const { return row(fp_off_, fp_, f); }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  static std::span<const int> row(const std::vector<int>& off, const std::vector<int>& data, std::size_t i) {
    return {data.data() + off[i], static_cast<std::size_t>(off[i + 1] - off[i])};
  }

  std::size_t n_vertices_ = 0;
  std::vector<Tet> tets_;
  std::vector<Tri> tris_;
  std::vector<Edge> edges_;
  std::vector<int> surface_vertices_;
  std::vector<std::pair<int, int>> face_pairs_;
  std::size_t non_manifold_edges_ = 0;
  std::vector<int> nbr_off_, nbr_;
  std::vector<int> snbr_off_, snbr_;
  std::vector<int> vt_off_, vt_;
  std::vector<int> vf_off_, vf_;
  std::vector<int> fp_off_, fp_;
};

// Each term returns its value and, when `grad` is non-null, overwrites *grad
// (resized to the vertex count) with the gradient with respect to positions.
double r_edge(const MeshTopology& topo, std::span<const Vec3> x, std::vector<Vec3>* grad, Exec exec = Exec::Parallel);
double r_laplacian(const MeshTopology& topo, std::span<const Vec3> x, double alpha, double beta,
                   std::vector<Vec3>* grad, Exec exec = Exec::Parallel);
// `degenerate_pairs`, when non-null, receives the number of face pairs skipped
// because one face has zero area.
double r_normal(const MeshTopology& topo, std::span<const Vec3> x, std::vector<Vec3>* grad,
                Exec exec = Exec::Parallel, std::size_t* degenerate_pairs = nullptr);

struct BarrierValue {
  double value = 0;
  double derivative = 0;
};
// -(d - v0)^2 log(d / v0) for 0 < d <= v0, 0 above v0, +inf for d <= 0.
BarrierValue barrier_l(double det, double v0);

// Sum of barrier_l over tets; +inf if any det <= 0 (gradient then zero).
double r_orientation(const MeshTopology& topo, std::span<const Vec3> x, double v0, std::vector<Vec3>* grad,
                     Exec exec = Exec::Parallel);

// sum_s || x_s - target_s + k * noise_s || over surface vertices (topo order).
// Targets are constants: no gradient flows through the predictor.
double robust_proj(const MeshTopology& topo, std::span<const Vec3> x, std::span<const Vec3> targets,
                   std::span<const Vec3> noise, double k, std::vector<Vec3>* grad, Exec exec = Exec::Parallel);

// Weighted objective with frozen targets and noise.
ObjectiveBreakdown evaluate_objective(const MeshTopology& topo, std::span<const Vec3> x, std::span<const Vec3> targets,
                                      std::span<const Vec3> noise, double k, const DeformConfig& cfg,
                                      std::vector<Vec3>* grad, Exec exec = Exec::Parallel);

double min_tet_det(const MeshTopology& topo, std::span<const Vec3> x, Exec exec = Exec::Parallel);
// Index of the first tet with det <= 0, or -1.
int first_inverted_tet(const MeshTopology& topo, std::span<const Vec3> x);

struct TraceRow {
  int step = 0;
  ObjectiveBreakdown objective;
  double k = 0;
  double min_det = 0;
};

struct DeformResult {
  TetMesh mesh;
  std::vector<TraceRow> trace;
  int halvings = 0;  // total step halvings across the run
};

// Adam on all vertex positions of `mesh`. Closest-point targets are re-queried
// at the current surface positions every iteration.
DeformResult optimize(const TetMesh& mesh, const VoxelGrid& grid, const ClosestPointPredictor& predictor,
                      const DeformConfig& cfg, Exec exec = Exec::Parallel);

// CSV: step,total,proj,edge,laplacian,normal,orientation,k,min_det
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);
void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace);

}  // namespace nvmg
