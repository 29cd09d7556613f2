#include <doctest.h>

#include <memory>
#include <sstream>

#include "nvmg/closest_point.hpp"
#include "nvmg/shapes.hpp"
#include "support.hpp"

using namespace nvmg;
using namespace nvmg::testing;

namespace {

Vec3 random_point(Rng& rng, double lo, double hi) {
  return {lo + (hi - lo) * uniform01(rng), lo + (hi - lo) * uniform01(rng), lo + (hi - lo) * uniform01(rng)};
}

// Minimum distance to a dense barycentric sampling of the triangle.
double sampled_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, int n) {
  double best = 1e300;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
      best = std::min(best, distance(p, a * (1 - u - v) + b * u + c * v));
    }
  return best;
}

TriMesh single_triangle() { return {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}}; }

}  // namespace

TEST_CASE("point-triangle closest point against dense sampling") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec3 a = random_point(rng, -1, 1), b = random_point(rng, -1, 1), c = random_point(rng, -1, 1);
    const Vec3 p = random_point(rng, -2, 2);
    const Vec3 q = closest_point_on_triangle(p, a, b, c);
    const double d = distance(p, q);
    CHECK(d <= sampled_distance(p, a, b, c, 60) + 1e-12);
    CHECK(d >= sampled_distance(p, a, b, c, 60) - 0.05);
  }
  // Degenerate triangle falls back to its edges.
  const Vec3 q = closest_point_on_triangle({0.5, 1, 0}, {0, 0, 0}, {1, 0, 0}, {2, 0, 0});
  CHECK(q == Vec3{0.5, 0, 0});
}

TEST_CASE("bvh structure") {
  const TriangleBvh one(single_triangle());
  CHECK(one.nodes().size() == 1);
  CHECK(one.nodes()[0].leaf());

  const TriMesh cube = box({0, 0, 0}, {1, 1, 1});
  const TriangleBvh tree(cube);
  const Aabb root = tree.nodes()[0].box;
  CHECK(root.lo == cube.bounds().lo);
  CHECK(root.hi == cube.bounds().hi);
  std::vector<int> seen(cube.faces.size(), 0);
  for (const auto& n : tree.nodes()) {
    if (!n.leaf()) {
      CHECK(n.box.contains(tree.nodes()[static_cast<std::size_t>(n.left)].box));
      CHECK(n.box.contains(tree.nodes()[static_cast<std::size_t>(n.right)].box));
      continue;
    }
    CHECK(n.count <= TriangleBvh::kLeafSize);
    for (int k = n.first; k < n.first + n.count; ++k) {
      const int t = tree.order()[static_cast<std::size_t>(k)];
      ++seen[static_cast<std::size_t>(t)];
      CHECK(n.box.contains(tree.triangle_box(t)));
    }
  }
  for (int s : seen) CHECK(s == 1);
}

TEST_CASE("bvh rejects all-degenerate surfaces") {
  const TriMesh flat{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}};
  CHECK_THROWS_AS(TriangleBvh{flat}, Error);
}

TEST_CASE("closest-point queries are sublinear on a large sphere") {
  const TriMesh sphere = icosphere(5);
  REQUIRE(sphere.faces.size() >= 10000);
  const TriangleBvh tree(sphere);
  Rng rng(5);
  std::uint64_t visits = 0;
  for (int i = 0; i < 100; ++i) {
    Vec3 dir{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
    tree.closest_point(dir / norm(dir) * (0.5 + uniform01(rng)), &visits);
  }
  CHECK(static_cast<double>(visits) / 100.0 < 0.05 * static_cast<double>(sphere.faces.size()));
}

TEST_CASE("closest point examples") {
  const TriangleBvh tree(icosphere(4));
  const Vec3 x{1.2, -0.8, 1.3};
  const ClosestPointResult r = tree.closest_point(x * (2.0 / norm(x)));
  CHECK(distance(r.point, x / norm(x)) < 0.02);
  CHECK(r.distance() == doctest::Approx(1.0).epsilon(0.01));

  const Vec3 on = tree.surface().vertices[17];
  const ClosestPointResult s = tree.closest_point(on);
  CHECK(s.squared_distance == 0.0);
  CHECK(s.point == on);
}

TEST_CASE("bvh matches brute force on random queries") {
  const TriMesh m = merge(icosphere(3), torus(1.2, 0.3, 40, 16));
  const TriangleBvh tree(m);
  Rng rng(99);
  std::vector<Vec3> queries;
  for (int i = 0; i < 500; ++i) queries.push_back(random_point(rng, -2, 2));
  std::vector<ClosestPointResult> par(queries.size()), ser(queries.size());
  tree.closest_points(queries, par, Exec::Parallel);
  tree.closest_points(queries, ser, Exec::Serial);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const ClosestPointResult b = tree.brute_force(queries[i]);
    CHECK(std::abs(par[i].distance() - b.distance()) < 1e-12);
    CHECK(par[i].triangle == b.triangle);
    CHECK(par[i].point == ser[i].point);
  }
}

TEST_CASE("ties go to the lowest triangle index") {
  // Two parallel triangles at equal distance above and below the query.
  const TriMesh m{{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {0, 0, -1}, {0, 1, -1}, {1, 0, -1}}, {{3, 4, 5}, {0, 1, 2}}};
  const TriangleBvh tree(m);
  CHECK(tree.closest_point({0.2, 0.2, 0}).triangle == 0);
  const TriMesh swapped{m.vertices, {{0, 1, 2}, {3, 4, 5}}};
  CHECK(TriangleBvh(swapped).closest_point({0.2, 0.2, 0}).triangle == 0);
}

TEST_CASE("distance field properties") {
  const TriMesh m = torus(1.0, 0.35, 32, 12);
  const TriangleBvh tree(m);
  Rng rng(3);
  // Dense surface sample for the optimality check.
  std::vector<Vec3> dense;
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    for (int k = 0; k < 10; ++k) {
      double u = uniform01(rng), v = uniform01(rng);
      if (u + v > 1) u = 1 - u, v = 1 - v;
      const auto& t = m.faces[f];
      dense.push_back(m.vertices[static_cast<std::size_t>(t[0])] * (1 - u - v) +
                      m.vertices[static_cast<std::size_t>(t[1])] * u + m.vertices[static_cast<std::size_t>(t[2])] * v);
    }
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = random_point(rng, -1.6, 1.6), y = random_point(rng, -1.6, 1.6);
    const ClosestPointResult cx = tree.closest_point(x), cy = tree.closest_point(y);
    // Idempotence.
    CHECK(distance(tree.closest_point(cx.point).point, cx.point) < 1e-12);
    // 1-Lipschitz.
    CHECK(std::abs(cx.distance() - cy.distance()) <= distance(x, y) + 1e-12);
    // Optimality against surface samples.
    double best = 1e300;
    for (const auto& p : dense) best = std::min(best, distance(x, p));
    CHECK(cx.distance() <= best + 1e-12);
  }
}

TEST_CASE("exact predictor ignores the grid") {
  auto tree = std::make_shared<const TriangleBvh>(icosphere(2));
  const ExactClosestPoint cp(tree);
  const Vec3 x{0.3, 2.0, -0.1};
  CHECK(cp.predict(VoxelGrid(2), x) == cp.predict(VoxelGrid(7), x));
  std::vector<Vec3> q{x, {0, 0, 3}}, out(2);
  cp.predict_batch(VoxelGrid(2), q, out);
  CHECK(out[0] == tree->closest_point(x).point);
  CHECK(out[1] == tree->closest_point(q[1]).point);
}

TEST_CASE("training samples at segment endpoints") {
  const VoxelGrid g = voxelize_mesh(icosphere(3), 8);
  const TetMesh mesh = build_tet_mesh(g);
  const TriangleBvh tree(surface_in_lattice(icosphere(3), g.frame()));
  SampleOptions opts;
  opts.jitter_sigma = 0;
  opts.fixed_alpha = 1.0;
  for (const auto& s : gen_training_samples(mesh, tree, 200, opts)) {
    bool is_vertex = false;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
      if (mesh.surface_vertex_flags[v] && mesh.vertices[v] == s.query) is_vertex = true;
    CHECK(is_vertex);
    CHECK(s.target == tree.closest_point(s.query).point);
  }
  opts.fixed_alpha = 0.0;
  for (const auto& s : gen_training_samples(mesh, tree, 200, opts)) {
    CHECK(distance(s.query, s.target) < 1e-12);
  }
}

TEST_CASE("training samples on a chair stay near the surface") {
  const VoxelGrid g = voxelize_mesh(chair(), 24);
  const TetMesh mesh = build_tet_mesh(g);
  const TriangleBvh tree(surface_in_lattice(chair(), g.frame()));
  SampleOptions opts;
  opts.seed = 2024;
  const auto samples = gen_training_samples(mesh, tree, 75000, opts);
  REQUIRE(samples.size() == 75000);
  const double bound = std::sqrt(3.0) + 3.0 * opts.jitter_sigma;
  std::size_t over = 0;
  for (const auto& s : samples) {
    const double d = distance(s.query, s.target);
    over += d > bound ? 1 : 0;
    CHECK(std::abs(d - tree.closest_point(s.query).distance()) < 1e-12);
  }
  CHECK(over == 0);
}

TEST_CASE("training samples are deterministic and thread-count independent") {
  const VoxelGrid g = voxelize_mesh(icosphere(3), 10);
  const TetMesh mesh = build_tet_mesh(g);
  const TriangleBvh tree(surface_in_lattice(icosphere(3), g.frame()));
  SampleOptions a;
  a.seed = 17;
  SampleOptions b = a;
  b.exec = Exec::Serial;
  const auto s1 = gen_training_samples(mesh, tree, 9000, a);
  const auto s2 = gen_training_samples(mesh, tree, 9000, a);
  const auto s3 = gen_training_samples(mesh, tree, 9000, b);
  REQUIRE(s1.size() == 9000);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].query == s2[i].query);
    CHECK(s1[i].query == s3[i].query);
    CHECK(s1[i].target == s3[i].target);
  }
  SampleOptions c = a;
  c.seed = 18;
  CHECK_FALSE(gen_training_samples(mesh, tree, 10, c)[0].query == s1[0].query);
  CHECK_THROWS_AS(gen_training_samples(mesh, tree, 0, a), Error);
}

TEST_CASE("sample file round trip and errors") {
  std::vector<CpSample> samples{{{1, 2, 3}, {4, 5, 6}}, {{-0.1, 1e-300, 7.5}, {0, 0, 0}}};
  std::stringstream ss;
  write_samples(ss, samples);
  const std::string bytes = ss.str();
  CHECK(bytes.size() == 8 + 2 * 48);
  CHECK(bytes.substr(0, 8) == "NVMGCPS1");
  // 1.0 little-endian.
  CHECK(static_cast<unsigned char>(bytes[8 + 7]) == 0x3F);
  CHECK(static_cast<unsigned char>(bytes[8 + 6]) == 0xF0);
  const auto back = read_samples(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].query == samples[1].query);
  CHECK(back[0].target == samples[0].target);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_samples(truncated), Error);
  std::stringstream magic("NVMGXXXX");
  CHECK_THROWS_AS(read_samples(magic), Error);
}
