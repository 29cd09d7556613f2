// Serial reference vs OpenMP paths of the hot kernels. Arg 0 = Serial, 1 = Parallel.

#include <benchmark/benchmark.h>

#include <memory>

#include "nvmg/closest_point.hpp"
#include "nvmg/deform.hpp"
#include "nvmg/quality.hpp"
#include "nvmg/shapes.hpp"

using namespace nvmg;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

struct SphereFixture {
  TriMesh sphere = icosphere(4);
  VoxelGrid grid = voxelize_mesh(sphere, 24);
  TetMesh mesh = build_tet_mesh(grid);
  MeshTopology topo{mesh};
  TriMesh reference = surface_in_lattice(sphere, grid.frame());
  TriangleBvh bvh{reference};
  std::vector<Vec3> targets, noise;

  SphereFixture() {
    Rng rng(1);
    for (int v : topo.surface_vertices()) {
      targets.push_back(bvh.closest_point(mesh.vertices[static_cast<std::size_t>(v)]).point);
      noise.push_back({standard_normal(rng), standard_normal(rng), standard_normal(rng)});
    }
  }
};

const SphereFixture& fixture() {
  static const SphereFixture f;
  return f;
}

void BM_Objective(benchmark::State& state) {
  const auto& f = fixture();
  const DeformConfig cfg;
  std::vector<Vec3> grad;
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_objective(f.topo, f.mesh.vertices, f.targets, f.noise, 0.1, cfg, &grad, exec_of(state)));
}

void BM_ClosestPointBatch(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<Vec3> queries;
  for (int v : f.topo.surface_vertices()) queries.push_back(f.mesh.vertices[static_cast<std::size_t>(v)]);
  std::vector<ClosestPointResult> out(queries.size());
  for (auto _ : state) {
    f.bvh.closest_points(queries, out, exec_of(state));
    benchmark::ClobberMemory();
  }
}

void BM_SelfIntersection(benchmark::State& state) {
  const TriMesh s = extract_surface(fixture().mesh).mesh;
  for (auto _ : state) benchmark::DoNotOptimize(count_self_intersections(s, exec_of(state)));
}

void BM_Chamfer(benchmark::State& state) {
  Rng r1(1), r2(2);
  const auto a = sample_surface(fixture().reference, 4000, r1);
  const auto b = sample_surface(extract_surface(fixture().mesh).mesh, 4000, r2);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer_distance(a, b, exec_of(state)));
}

void BM_Voxelize(benchmark::State& state) {
  const TriMesh sphere = icosphere(3);
  VoxelizeOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(voxelize_mesh(sphere, 16, opts).count());
}

}  // namespace

BENCHMARK(BM_Objective)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClosestPointBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SelfIntersection)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Chamfer)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Voxelize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
