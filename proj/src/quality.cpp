#include "nvmg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nvmg/closest_point.hpp"
#include "nvmg/mesh_io.hpp"
#include "nvmg/predicates.hpp"

namespace nvmg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool share_vertex(const Tri& a, const Tri& b) {
  for (int i : a)
    for (int j : b)
      if (i == j) return true;
  return false;
}

struct Stats {
  double mean = 0, min = 0, max = 0;
  std::size_t degenerate = 0;
};

Stats finite_stats(const std::vector<double>& values) {
  Stats s;
  double sum = 0;
  std::size_t n = 0;
  s.min = kInf;
  s.max = -kInf;
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++s.degenerate;
      continue;
    }
    sum += v;
    ++n;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  if (n == 0) return {0, 0, 0, s.degenerate};
  s.mean = sum / static_cast<double>(n);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double triangle_ar(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
  const double area = 0.5 * norm(cross(b - a, c - a));
  const double longest = std::max({la, lb, lc});
  if (!(area > 1e-12 * longest * longest)) return kInf;
  const double circum = la * lb * lc / (4.0 * area);
  const double in = area / (0.5 * (la + lb + lc));
  return circum / (2.0 * in);
}

double tet_ar(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  const double volume = std::abs(homogeneous_det(p0, p1, p2, p3)) / 6.0;
  if (!(volume > 0)) return kInf;
  const double faces = 0.5 * (norm(cross(p2 - p1, p3 - p1)) + norm(cross(p2 - p0, p3 - p0)) +
                              norm(cross(p1 - p0, p3 - p0)) + norm(cross(p1 - p0, p2 - p0)));
  const double h_max = std::sqrt(std::max({squared_distance(p0, p1), squared_distance(p0, p2),
                                           squared_distance(p0, p3), squared_distance(p1, p2),
                                           squared_distance(p1, p3), squared_distance(p2, p3)}));
  const double inradius = 3.0 * volume / faces;
  return h_max / (2.0 * std::sqrt(6.0) * inradius);
}

std::size_t count_flipped_tets(const TetMesh& mesh) {
  std::size_t n = 0;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    if (!(tet_det(mesh, t) > 0)) ++n;
  return n;
}

std::size_t count_flipped_triangles(const TetMesh& mesh) {
  std::size_t n = 0;
  for (std::size_t f = 0; f < mesh.surface_tris.size(); ++f) {
    const auto& t = mesh.surface_tris[f];
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(t[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(t[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(t[2])];
    const Vec3 centroid = (a + b + c) / 3.0;
    const Vec3& d = mesh.vertices[static_cast<std::size_t>(mesh.surface_opposite[f])];
    if (!(dot(cross(b - a, c - a), centroid - d) > 0)) ++n;
  }
  return n;
}

std::size_t count_self_intersections(const TriMesh& surface, Exec exec) {
  const auto& V = surface.vertices;
  const auto& F = surface.faces;
  bool any_area = false;
  for (const auto& f : F)
    if (squared_norm(cross(V[static_cast<std::size_t>(f[1])] - V[static_cast<std::size_t>(f[0])],
                           V[static_cast<std::size_t>(f[2])] - V[static_cast<std::size_t>(f[0])])) > 0)
      any_area = true;
  if (!any_area) return 0;

  const TriangleBvh tree(surface);
  const auto& nodes = tree.nodes();
  const auto& order = tree.order();
  std::vector<std::uint8_t> hit(F.size(), 0);
  for_each_index(static_cast<std::ptrdiff_t>(F.size()), exec, [&](std::ptrdiff_t ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Tri& fi = F[i];
    const Aabb box = tree.triangle_box(static_cast<int>(i));
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0 && !hit[i]) {
      const auto& node = nodes[static_cast<std::size_t>(stack[--top])];
      if (!node.box.overlaps(box)) continue;
      if (!node.leaf()) {
        stack[top++] = node.left;
        stack[top++] = node.right;
        continue;
      }
      for (int k = node.first; k < node.first + node.count; ++k) {
        const auto j = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
        if (j == i || share_vertex(fi, F[j])) continue;
        if (!tree.triangle_box(static_cast<int>(j)).overlaps(box)) continue;
        const Tri& fj = F[j];
        if (triangles_intersect(V[static_cast<std::size_t>(fi[0])], V[static_cast<std::size_t>(fi[1])],
                                V[static_cast<std::size_t>(fi[2])], V[static_cast<std::size_t>(fj[0])],
                                V[static_cast<std::size_t>(fj[1])], V[static_cast<std::size_t>(fj[2])])) {
          hit[i] = 1;
          break;
        }
      }
    }
  });
  return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
}

std::size_t count_self_intersections_brute(const TriMesh& surface) {
  const auto& V = surface.vertices;
  const auto& F = surface.faces;
  std::vector<std::uint8_t> hit(F.size(), 0);
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = i + 1; j < F.size(); ++j) {
      if (share_vertex(F[i], F[j])) continue;
      const Tri& a = F[i];
      const Tri& b = F[j];
      if (triangles_intersect(V[static_cast<std::size_t>(a[0])], V[static_cast<std::size_t>(a[1])],
                              V[static_cast<std::size_t>(a[2])], V[static_cast<std::size_t>(b[0])],
                              V[static_cast<std::size_t>(b[1])], V[static_cast<std::size_t>(b[2])]))
        hit[i] = hit[j] = 1;
    }
  return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
}

std::vector<Vec3> sample_surface(const TriMesh& surface, std::size_t n, Rng& rng) {
  validate_surface(surface);
  std::vector<double> cdf(surface.faces.size());
  double total = 0;
  for (std::size_t f = 0; f < surface.faces.size(); ++f) {
    total += surface.area(f);
    cdf[f] = total;
  }
  if (!(total > 0)) throw Error("degenerate", "surface has zero area");
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto& t = surface.faces[static_cast<std::size_t>(it - cdf.begin())];
    const double r1 = std::sqrt(uniform01(rng)), r2 = uniform01(rng);
    const Vec3& a = surface.vertices[static_cast<std::size_t>(t[0])];
    const Vec3& b = surface.vertices[static_cast<std::size_t>(t[1])];
    const Vec3& c = surface.vertices[static_cast<std::size_t>(t[2])];
    out.push_back(a * (1 - r1) + b * (r1 * (1 - r2)) + c * (r1 * r2));
  }
  return out;
}

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b, Exec exec) {
  if (a.empty() || b.empty()) throw Error("empty", "chamfer distance needs non-empty point sets");
  auto one_way = [exec](std::span<const Vec3> from, std::span<const Vec3> to) {
    std::vector<double> nearest(from.size());
    for_each_index(static_cast<std::ptrdiff_t>(from.size()), exec, [&](std::ptrdiff_t i) {
      const Vec3& p = from[static_cast<std::size_t>(i)];
      double best = kInf;
      for (const Vec3& q : to) best = std::min(best, squared_distance(p, q));
      nearest[static_cast<std::size_t>(i)] = best;
    });
    double s = 0;
    for (double d : nearest) s += d;
    return s / static_cast<double>(from.size());
  };
  return 0.5 * (one_way(a, b) + one_way(b, a));
}

QualityReport quality_report(const TetMesh& mesh, Exec exec) {
  QualityReport r;
  r.n_tris = mesh.surface_tris.size();
  r.n_tets = mesh.tets.size();
  const auto& V = mesh.vertices;

  std::vector<double> tri(r.n_tris), tet(r.n_tets);
  for_each_index(static_cast<std::ptrdiff_t>(r.n_tris), exec, [&](std::ptrdiff_t f) {
    const auto& t = mesh.surface_tris[static_cast<std::size_t>(f)];
    tri[static_cast<std::size_t>(f)] =
        triangle_ar(V[static_cast<std::size_t>(t[0])], V[static_cast<std::size_t>(t[1])], V[static_cast<std::size_t>(t[2])]);
  });
  for_each_index(static_cast<std::ptrdiff_t>(r.n_tets), exec, [&](std::ptrdiff_t k) {
    const auto& t = mesh.tets[static_cast<std::size_t>(k)];
    tet[static_cast<std::size_t>(k)] = tet_ar(V[static_cast<std::size_t>(t[0])], V[static_cast<std::size_t>(t[1])],
                                              V[static_cast<std::size_t>(t[2])], V[static_cast<std::size_t>(t[3])]);
  });
  const Stats ts = finite_stats(tri), hs = finite_stats(tet);
  r.tri_ar_mean = ts.mean, r.tri_ar_min = ts.min, r.tri_ar_max = ts.max, r.tri_degenerate_count = ts.degenerate;
  r.tet_ar_mean = hs.mean, r.tet_ar_min = hs.min, r.tet_ar_max = hs.max, r.tet_degenerate_count = hs.degenerate;
  r.tri_ar_over_threshold_count =
      static_cast<std::size_t>(std::count_if(tri.begin(), tri.end(), [](double v) { return v > kTriArHighlight; }));

  r.tri_flip_count = count_flipped_triangles(mesh);
  r.tet_flip_count = count_flipped_tets(mesh);
  r.self_intersection_count = count_self_intersections(extract_surface(mesh).mesh, exec);
  return r;
}

std::string quality_report_json(const QualityReport& r) {
  nlohmann::ordered_json j;
  j["tri_ar_mean"] = r.tri_ar_mean;
  j["tri_ar_min"] = r.tri_ar_min;
  j["tri_ar_max"] = r.tri_ar_max;
  j["tet_ar_mean"] = r.tet_ar_mean;
  j["tet_ar_min"] = r.tet_ar_min;
  j["tet_ar_max"] = r.tet_ar_max;
  j["tri_flip_count"] = r.tri_flip_count;
  j["tet_flip_count"] = r.tet_flip_count;
  j["self_intersection_count"] = r.self_intersection_count;
  j["n_tris"] = r.n_tris;
  j["n_tets"] = r.n_tets;
  j["tri_ar_over_threshold_count"] = r.tri_ar_over_threshold_count;
  j["tri_degenerate_count"] = r.tri_degenerate_count;
  j["tet_degenerate_count"] = r.tet_degenerate_count;
  return j.dump(2) + "\n";
}

QualityReport quality_report_from_json(const std::string& text) {
  QualityReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.tri_ar_mean = j.at("tri_ar_mean").get<double>();
    r.tri_ar_min = j.at("tri_ar_min").get<double>();
    r.tri_ar_max = j.at("tri_ar_max").get<double>();
    r.tet_ar_mean = j.at("tet_ar_mean").get<double>();
    r.tet_ar_min = j.at("tet_ar_min").get<double>();
    r.tet_ar_max = j.at("tet_ar_max").get<double>();
    r.tri_flip_count = j.at("tri_flip_count").get<std::size_t>();
    r.tet_flip_count = j.at("tet_flip_count").get<std::size_t>();
    r.self_intersection_count = j.at("self_intersection_count").get<std::size_t>();
    r.n_tris = j.at("n_tris").get<std::size_t>();
    r.n_tets = j.at("n_tets").get<std::size_t>();
    r.tri_ar_over_threshold_count = j.at("tri_ar_over_threshold_count").get<std::size_t>();
    r.tri_degenerate_count = j.value("tri_degenerate_count", std::size_t{0});
    r.tet_degenerate_count = j.value("tet_degenerate_count", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error("format", std::string("quality report: ") + e.what());
  }
  return r;
}

BatchReport batch_report(std::span<const QualityReport> reports) {
  if (reports.empty()) throw Error("empty", "batch report needs at least one report");
  BatchReport b;
  b.n_meshes = reports.size();
  std::vector<double> tri_min, tri_max, tet_min, tet_max;
  double tri_mean = 0, tet_mean = 0, tri_flip = 0, tet_flip = 0, si = 0;
  for (const auto& r : reports) {
    tri_mean += r.tri_ar_mean;
    tet_mean += r.tet_ar_mean;
    tri_flip += static_cast<double>(r.tri_flip_count);
    tet_flip += static_cast<double>(r.tet_flip_count);
    si += static_cast<double>(r.self_intersection_count);
    tri_min.push_back(r.tri_ar_min);
    tri_max.push_back(r.tri_ar_max);
    tet_min.push_back(r.tet_ar_min);
    tet_max.push_back(r.tet_ar_max);
  }
  const auto n = static_cast<double>(reports.size());
  b.tri_ar_mean = tri_mean / n;
  b.tet_ar_mean = tet_mean / n;
  b.tri_flip = tri_flip / n;
  b.tet_flip = tet_flip / n;
  b.self_intersection = si / n;
  b.tri_ar_min = median(std::move(tri_min));
  b.tri_ar_max = median(std::move(tri_max));
  b.tet_ar_min = median(std::move(tet_min));
  b.tet_ar_max = median(std::move(tet_max));
  return b;
}

namespace {

std::string triple(double a, double b, double c) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << a << '/' << b << '/' << c;
  return ss.str();
}

std::string fixed2(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

void write_table(std::ostream& out, const std::vector<std::array<std::string, 6>>& rows) {
  std::array<std::size_t, 6> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], r[c].size());
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 6; ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[c])) << r[c];
    }
    out << '\n';
  }
}

}  // namespace

void write_quality_table(std::ostream& out, std::span<const std::pair<std::string, QualityReport>> rows) {
  std::vector<std::array<std::string, 6>> cells{
      {"", "triAR (mean/min/max)", "tetAR (mean/min/max)", "triFlip", "tetFlip", "self-intersection"}};
  for (const auto& [name, r] : rows)
    cells.push_back({name, triple(r.tri_ar_mean, r.tri_ar_min, r.tri_ar_max),
                     triple(r.tet_ar_mean, r.tet_ar_min, r.tet_ar_max), std::to_string(r.tri_flip_count),
                     std::to_string(r.tet_flip_count), std::to_string(r.self_intersection_count)});
  write_table(out, cells);
}

void write_batch_table(std::ostream& out, std::span<const std::pair<std::string, BatchReport>> rows) {
  std::vector<std::array<std::string, 6>> cells{
      {"", "triAR (mean/min/max)", "tetAR (mean/min/max)", "triFlip", "tetFlip", "self-intersection"}};
  for (const auto& [name, b] : rows)
    cells.push_back({name, triple(b.tri_ar_mean, b.tri_ar_min, b.tri_ar_max),
                     triple(b.tet_ar_mean, b.tet_ar_min, b.tet_ar_max), fixed2(b.tri_flip), fixed2(b.tet_flip),
                     fixed2(b.self_intersection)});
  write_table(out, cells);
}

}  // namespace nvmg
