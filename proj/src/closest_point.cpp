#include "nvmg/closest_point.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "nvmg/mesh_io.hpp"
#include "nvmg/rng.hpp"

namespace nvmg {

namespace {

Vec3 closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

bool better(double d2, int tri, const ClosestPointResult& best) {
  return d2 < best.squared_distance || (d2 == best.squared_distance && tri < best.triangle);
}

constexpr char kSampleMagic[8] = {'N', 'V', 'M', 'G', 'C', 'P', 'S', '1'};

void put_f64_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

bool get_f64_le(std::istream& in, double& v) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  std::memcpy(&v, &bits, sizeof v);
  return true;
}

}  // namespace

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a;
  if (squared_norm(cross(ab, ac)) == 0) {
    Vec3 best = closest_point_on_segment(p, a, b);
    double bd = squared_distance(p, best);
    for (const Vec3& q : {closest_point_on_segment(p, b, c), closest_point_on_segment(p, c, a)}) {
      const double d = squared_distance(p, q);
      if (d < bd) bd = d, best = q;
    }
    return best;
  }
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleBvh::TriangleBvh(const TriMesh& surface) : surface_(surface) {
  validate_surface(surface_);
  bool any_area = false;
  tri_.reserve(surface_.faces.size());
  for (const auto& f : surface_.faces) {
    tri_.push_back({surface_.vertices[f[0]], surface_.vertices[f[1]], surface_.vertices[f[2]]});
    const auto& t = tri_.back();
    if (squared_norm(cross(t[1] - t[0], t[2] - t[0])) > 0) any_area = true;
  }
  if (!any_area) throw Error("degenerate", "all surface triangles are degenerate");
  order_.resize(tri_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * tri_.size() / kLeafSize + 2);
  build(0, static_cast<int>(order_.size()));
}

Aabb TriangleBvh::triangle_box(int t) const {
  Aabb b;
  for (const auto& v : tri_[static_cast<std::size_t>(t)]) b.extend(v);
  return b;
}

int TriangleBvh::build(int first, int count) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, centroids;
  for (int i = first; i < first + count; ++i) {
    const Aabb tb = triangle_box(order_[static_cast<std::size_t>(i)]);
    box.extend(tb);
    centroids.extend(tb.center());
  }
  nodes_[static_cast<std::size_t>(id)].box = box;
  if (count <= kLeafSize) {
    nodes_[static_cast<std::size_t>(id)].first = first;
    nodes_[static_cast<std::size_t>(id)].count = count;
    return id;
  }
  const Vec3 ext = centroids.extent();
  const int axis = (ext.x >= ext.y && ext.x >= ext.z) ? 0 : (ext.y >= ext.z ? 1 : 2);
  const int half = count / 2;
  auto begin = order_.begin() + first;
  std::nth_element(begin, begin + half, begin + count, [&](int a, int b) {
    const double ca = triangle_box(a).center()[axis], cb = triangle_box(b).center()[axis];
    return ca != cb ? ca < cb : a < b;
  });
  const int left = build(first, half);
  const int right = build(first + half, count - half);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

ClosestPointResult TriangleBvh::closest_point(const Vec3& x, std::uint64_t* node_visits) const {
  ClosestPointResult best;
  best.squared_distance = std::numeric_limits<double>::infinity();
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (node_visits) ++*node_visits;
    // Equal box distance can still hide a lower-index tie, so prune strictly.
    if (node.box.squared_distance(x) > best.squared_distance) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order_[static_cast<std::size_t>(i)];
        const auto& v = tri_[static_cast<std::size_t>(t)];
        const Vec3 q = closest_point_on_triangle(x, v[0], v[1], v[2]);
        const double d2 = squared_distance(x, q);
        if (better(d2, t, best)) best = {q, d2, t};
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    // Push the farther child first so the nearer one is explored first.
    if (l.box.squared_distance(x) <= r.box.squared_distance(x)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

void TriangleBvh::closest_points(std::span<const Vec3> queries, std::span<ClosestPointResult> out,
                                 Exec exec) const {
  if (queries.size() != out.size()) throw Error("shape", "closest_points: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = closest_point(queries[static_cast<std::size_t>(i)]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = closest_point(queries[static_cast<std::size_t>(i)]);
  }
}

ClosestPointResult TriangleBvh::brute_force(const Vec3& x) const {
  ClosestPointResult best;
  best.squared_distance = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < tri_.size(); ++t) {
    const auto& v = tri_[t];
    const Vec3 q = closest_point_on_triangle(x, v[0], v[1], v[2]);
    const double d2 = squared_distance(x, q);
    if (better(d2, static_cast<int>(t), best)) best = {q, d2, static_cast<int>(t)};
  }
  return best;
}

void ClosestPointPredictor::predict_batch(const VoxelGrid& grid, std::span<const Vec3> queries, std::span<Vec3> out,
                                          Exec exec) const {
  if (queries.size() != out.size()) throw Error("shape", "predict_batch: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = predict(grid, queries[static_cast<std::size_t>(i)]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = predict(grid, queries[static_cast<std::size_t>(i)]);
  }
}

Vec3 ExactClosestPoint::predict(const VoxelGrid&, const Vec3& x) const { return bvh_->closest_point(x).point; }

void ExactClosestPoint::predict_batch(const VoxelGrid&, std::span<const Vec3> queries, std::span<Vec3> out,
                                      Exec exec) const {
  if (queries.size() != out.size()) throw Error("shape", "predict_batch: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = bvh_->closest_point(queries[static_cast<std::size_t>(i)]).point;
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = bvh_->closest_point(queries[static_cast<std::size_t>(i)]).point;
  }
}

std::vector<CpSample> gen_training_samples(const TetMesh& mesh, const TriangleBvh& bvh, std::size_t n,
                                           const SampleOptions& opts) {
  if (n == 0) throw Error("usage", "sample count must be >= 1");
  if (!(opts.jitter_sigma >= 0)) throw Error("usage", "jitter sigma must be >= 0");
  std::vector<int> surface;
  for (std::size_t v = 0; v < mesh.surface_vertex_flags.size(); ++v)
    if (mesh.surface_vertex_flags[v]) surface.push_back(static_cast<int>(v));
  if (surface.empty()) throw Error("empty", "mesh has no surface vertices");

  std::vector<Vec3> anchors(surface.size());
  for (std::size_t i = 0; i < surface.size(); ++i) anchors[i] = mesh.vertices[static_cast<std::size_t>(surface[i])];
  std::vector<ClosestPointResult> foot(surface.size());
  bvh.closest_points(anchors, foot, opts.exec);

  constexpr std::size_t kChunk = 4096;
  const auto chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
  std::vector<CpSample> samples(n);
  auto run_chunk = [&](std::ptrdiff_t c) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(c)));
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(n, begin + kChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t s = uniform_index(rng, surface.size());
      const double alpha = opts.fixed_alpha ? *opts.fixed_alpha : uniform01(rng);
      const Vec3 jitter{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
      const Vec3& v = anchors[s];
      const Vec3& p = foot[s].point;
      Vec3 x = p * (1.0 - alpha) + v * alpha;
      if (opts.jitter_sigma > 0) x += jitter * opts.jitter_sigma;
      samples[i] = {x, bvh.closest_point(x).point};
    }
  };
  if (opts.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (std::ptrdiff_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  return samples;
}

void write_samples(std::ostream& out, std::span<const CpSample> samples) {
  out.write(kSampleMagic, sizeof kSampleMagic);
  for (const auto& s : samples) {
    for (int a = 0; a < 3; ++a) put_f64_le(out, s.query[a]);
    for (int a = 0; a < 3; ++a) put_f64_le(out, s.target[a]);
  }
}

void write_samples(const std::filesystem::path& path, std::span<const CpSample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  write_samples(out, samples);
}

std::vector<CpSample> read_samples(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kSampleMagic, 8) != 0)
    throw Error("format", "sample file: bad magic");
  std::vector<CpSample> out;
  for (;;) {
    CpSample s;
    double v = 0;
    if (!get_f64_le(in, v)) {
      if (in.gcount() != 0) throw Error("format", "sample file: truncated record");
      break;
    }
    s.query.x = v;
    bool ok = get_f64_le(in, s.query.y) && get_f64_le(in, s.query.z) && get_f64_le(in, s.target.x) &&
              get_f64_le(in, s.target.y) && get_f64_le(in, s.target.z);
    if (!ok) throw Error("format", "sample file: truncated record");
    out.push_back(s);
  }
  return out;
}

std::vector<CpSample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_samples(in);
}

}  // namespace nvmg
