#include "nvmg/deform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "nvmg/rng.hpp"

namespace nvmg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Builds CSR offsets/data from (row, value) pairs, keeping insertion order
// within each row.
void build_csr(std::size_t rows, const std::vector<std::pair<int, int>>& entries, std::vector<int>& off,
               std::vector<int>& data) {
  off.assign(rows + 1, 0);
  for (const auto& [r, v] : entries) ++off[static_cast<std::size_t>(r) + 1];
  for (std::size_t i = 0; i < rows; ++i) off[i + 1] += off[i];
  data.assign(entries.size(), 0);
  std::vector<int> fill(off.begin(), off.end() - 1);
  for (const auto& [r, v] : entries) data[static_cast<std::size_t>(fill[static_cast<std::size_t>(r)]++)] = v;
}

double ordered_sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

void check_positions(const MeshTopology& topo, std::span<const Vec3> x) {
  if (x.size() != topo.num_vertices()) throw Error("shape", "position count does not match mesh");
}

}  // namespace

void DeformConfig::validate() const {
  if (steps < 1) throw Error("config", "steps must be >= 1");
  if (!(v0 > 0)) throw Error("config", "v0 must be > 0");
  if (!(k0 >= 0)) throw Error("config", "k0 must be >= 0");
  if (!(noise_decay >= 0 && noise_decay < 1)) throw Error("config", "noise_decay must lie in [0, 1)");
  if (noise_period < 1) throw Error("config", "noise_period must be >= 1");
  if (!(lambda_a >= 0 && lambda_b >= 0 && lambda_c >= 0)) throw Error("config", "lambdas must be >= 0");
  if (!(laplacian_alpha >= 0 && laplacian_beta >= 0)) throw Error("config", "laplacian weights must be >= 0");
  if (!(step_size > 0) || !std::isfinite(step_size)) throw Error("config", "step_size must be > 0");
  if (max_halvings < 0) throw Error("config", "max_halvings must be >= 0");
}

double DeformConfig::noise_at(int step) const {
  double k = k0;
  for (int i = 0; i < step / noise_period; ++i) k *= noise_decay;
  return k;
}

namespace {

nlohmann::json to_json_object(const DeformConfig& c) {
  return {{"steps", c.steps},
          {"lambda_a", c.lambda_a},
          {"lambda_b", c.lambda_b},
          {"lambda_c", c.lambda_c},
          {"laplacian_alpha", c.laplacian_alpha},
          {"laplacian_beta", c.laplacian_beta},
          {"v0", c.v0},
          {"k0", c.k0},
          {"noise_decay", c.noise_decay},
          {"noise_period", c.noise_period},
          {"step_size", c.step_size},
          {"seed", c.seed},
          {"use_barrier", c.use_barrier},
          {"max_halvings", c.max_halvings}};
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

DeformConfig deform_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config", "config must be a JSON object");
  const auto known = to_json_object(DeformConfig{});
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw Error("config", "unknown config field '" + key + "'");
  DeformConfig c;
  read_field(j, "steps", c.steps);
  read_field(j, "lambda_a", c.lambda_a);
  read_field(j, "lambda_b", c.lambda_b);
  read_field(j, "lambda_c", c.lambda_c);
  read_field(j, "laplacian_alpha", c.laplacian_alpha);
  read_field(j, "laplacian_beta", c.laplacian_beta);
  read_field(j, "v0", c.v0);
  read_field(j, "k0", c.k0);
  read_field(j, "noise_decay", c.noise_decay);
  read_field(j, "noise_period", c.noise_period);
  read_field(j, "step_size", c.step_size);
  read_field(j, "seed", c.seed);
  read_field(j, "use_barrier", c.use_barrier);
  read_field(j, "max_halvings", c.max_halvings);
  c.validate();
  return c;
}

DeformConfig load_deform_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deform_config_from_json(ss.str());
}

std::string deform_config_to_json(const DeformConfig& cfg) { return to_json_object(cfg).dump(2) + "\n"; }

MeshTopology::MeshTopology(const TetMesh& mesh)
    : n_vertices_(mesh.vertices.size()), tets_(mesh.tets), tris_(mesh.surface_tris), edges_(mesh.edges) {
  const std::size_t nv = n_vertices_;

  std::vector<std::pair<int, int>> entries;
  entries.reserve(edges_.size() * 2);
  for (const auto& [a, b] : edges_) {
    entries.emplace_back(a, b);
    entries.emplace_back(b, a);
  }
  std::sort(entries.begin(), entries.end());
  build_csr(nv, entries, nbr_off_, nbr_);

  // Surface edges with their incident faces.
  struct EdgeFace {
    Edge e;
    int face;
  };
  std::vector<EdgeFace> ef;
  ef.reserve(tris_.size() * 3);
  for (std::size_t f = 0; f < tris_.size(); ++f)
    for (int s = 0; s < 3; ++s) {
      const int a = tris_[f][static_cast<std::size_t>(s)], b = tris_[f][static_cast<std::size_t>((s + 1) % 3)];
      ef.push_back({{std::min(a, b), std::max(a, b)}, static_cast<int>(f)});
    }
  std::sort(ef.begin(), ef.end(), [](const EdgeFace& l, const EdgeFace& r) {
    return l.e != r.e ? l.e < r.e : l.face < r.face;
  });
  entries.clear();
  for (std::size_t i = 0; i < ef.size();) {
    std::size_t j = i + 1;
    while (j < ef.size() && ef[j].e == ef[i].e) ++j;
    entries.emplace_back(ef[i].e.first, ef[i].e.second);
    entries.emplace_back(ef[i].e.second, ef[i].e.first);
    if (j - i == 2) face_pairs_.emplace_back(ef[i].face, ef[i + 1].face);
    else ++non_manifold_edges_;
    i = j;
  }
  std::sort(entries.begin(), entries.end());
  build_csr(nv, entries, snbr_off_, snbr_);

  entries.clear();
  for (std::size_t p = 0; p < face_pairs_.size(); ++p) {
    entries.emplace_back(face_pairs_[p].first, static_cast<int>(p));
    entries.emplace_back(face_pairs_[p].second, static_cast<int>(p));
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  build_csr(tris_.size(), entries, fp_off_, fp_);

  entries.clear();
  for (std::size_t t = 0; t < tets_.size(); ++t)
    for (int s = 0; s < 4; ++s) entries.emplace_back(tets_[t][static_cast<std::size_t>(s)], static_cast<int>(t * 4) + s);
  build_csr(nv, entries, vt_off_, vt_);

  entries.clear();
  for (std::size_t f = 0; f < tris_.size(); ++f)
    for (int s = 0; s < 3; ++s) entries.emplace_back(tris_[f][static_cast<std::size_t>(s)], static_cast<int>(f * 3) + s);
  build_csr(nv, entries, vf_off_, vf_);

  for (std::size_t v = 0; v < nv; ++v)
    if (mesh.surface_vertex_flags[v]) surface_vertices_.push_back(static_cast<int>(v));
}

double r_edge(const MeshTopology& topo, std::span<const Vec3> x, std::vector<Vec3>* grad, Exec exec) {
  check_positions(topo, x);
  const auto& edges = topo.edges();
  std::vector<double> terms(edges.size());
  for_each_index(static_cast<std::ptrdiff_t>(edges.size()), exec, [&](std::ptrdiff_t e) {
    const auto& [a, b] = edges[static_cast<std::size_t>(e)];
    terms[static_cast<std::size_t>(e)] = squared_distance(x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
  });
  if (grad) {
    grad->assign(x.size(), Vec3{});
    for_each_index(static_cast<std::ptrdiff_t>(x.size()), exec, [&](std::ptrdiff_t v) {
      const auto k = static_cast<std::size_t>(v);
      Vec3 g;
      for (int j : topo.neighbors(k)) g += x[k] - x[static_cast<std::size_t>(j)];
      (*grad)[k] = g * 2.0;
    });
  }
  return ordered_sum(terms);
}

double r_laplacian(const MeshTopology& topo, std::span<const Vec3> x, double alpha, double beta,
                   std::vector<Vec3>* grad, Exec exec) {
  check_positions(topo, x);
  const std::size_t n = x.size();
  // Residuals delta_i - v_i on the volume graph and the surface graph.
  std::vector<Vec3> rv(n), rs(n);
  std::vector<double> terms(n);
  for_each_index(static_cast<std::ptrdiff_t>(n), exec, [&](std::ptrdiff_t v) {
    const auto i = static_cast<std::size_t>(v);
    const auto nb = topo.neighbors(i);
    if (!nb.empty()) {
      Vec3 mean;
      for (int j : nb) mean += x[static_cast<std::size_t>(j)];
      rv[i] = mean / static_cast<double>(nb.size()) - x[i];
    }
    const auto snb = topo.surface_neighbors(i);
    if (!snb.empty()) {
      Vec3 mean;
      for (int j : snb) mean += x[static_cast<std::size_t>(j)];
      rs[i] = mean / static_cast<double>(snb.size()) - x[i];
    }
    terms[i] = alpha * squared_norm(rv[i]) + beta * squared_norm(rs[i]);
  });
  if (grad) {
    grad->assign(n, Vec3{});
    for_each_index(static_cast<std::ptrdiff_t>(n), exec, [&](std::ptrdiff_t v) {
      const auto k = static_cast<std::size_t>(v);
      Vec3 gv = -rv[k];
      for (int i : topo.neighbors(k))
        gv += rv[static_cast<std::size_t>(i)] / static_cast<double>(topo.neighbors(static_cast<std::size_t>(i)).size());
      Vec3 gs = -rs[k];
      for (int i : topo.surface_neighbors(k))
        gs += rs[static_cast<std::size_t>(i)] /
              static_cast<double>(topo.surface_neighbors(static_cast<std::size_t>(i)).size());
      (*grad)[k] = gv * (2.0 * alpha) + gs * (2.0 * beta);
    });
  }
  return ordered_sum(terms);
}

double r_normal(const MeshTopology& topo, std::span<const Vec3> x, std::vector<Vec3>* grad, Exec exec,
                std::size_t* degenerate_pairs) {
  check_positions(topo, x);
  const auto& tris = topo.surface_tris();
  const auto& pairs = topo.face_pairs();
  const std::size_t nf = tris.size();
  std::vector<Vec3> unit(nf);
  std::vector<double> len(nf);
  for_each_index(static_cast<std::ptrdiff_t>(nf), exec, [&](std::ptrdiff_t f) {
    const auto& t = tris[static_cast<std::size_t>(f)];
    const Vec3& a = x[static_cast<std::size_t>(t[0])];
    const Vec3 c = cross(x[static_cast<std::size_t>(t[1])] - a, x[static_cast<std::size_t>(t[2])] - a);
    const double l = norm(c);
    len[static_cast<std::size_t>(f)] = l;
    unit[static_cast<std::size_t>(f)] = l > 0 ? c / l : Vec3{};
  });
  std::vector<double> terms(pairs.size());
  std::vector<std::uint8_t> valid(pairs.size());
  for_each_index(static_cast<std::ptrdiff_t>(pairs.size()), exec, [&](std::ptrdiff_t p) {
    const auto [f, g] = pairs[static_cast<std::size_t>(p)];
    const bool ok = len[static_cast<std::size_t>(f)] > 0 && len[static_cast<std::size_t>(g)] > 0;
    valid[static_cast<std::size_t>(p)] = ok;
    terms[static_cast<std::size_t>(p)] = ok ? 1.0 - dot(unit[static_cast<std::size_t>(f)], unit[static_cast<std::size_t>(g)]) : 0.0;
  });
  if (degenerate_pairs)
    *degenerate_pairs = static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{0}));

  if (grad) {
    // dL/dc_f for the unnormalized normal c_f, gathered over the face's pairs.
    std::vector<Vec3> dc(nf);
    for_each_index(static_cast<std::ptrdiff_t>(nf), exec, [&](std::ptrdiff_t fi) {
      const auto f = static_cast<std::size_t>(fi);
      Vec3 w;
      for (int p : topo.face_pair_ids(f)) {
        if (!valid[static_cast<std::size_t>(p)]) continue;
        const auto [a, b] = pairs[static_cast<std::size_t>(p)];
        const auto other = static_cast<std::size_t>(static_cast<std::size_t>(a) == f ? b : a);
        const Vec3& n = unit[f];
        const Vec3& m = unit[other];
        w -= (m - n * dot(n, m)) / len[f];
      }
      dc[f] = w;
    });
    std::vector<Vec3> slot(nf * 3);
    for_each_index(static_cast<std::ptrdiff_t>(nf), exec, [&](std::ptrdiff_t fi) {
      const auto f = static_cast<std::size_t>(fi);
      const auto& t = tris[f];
      const Vec3& a = x[static_cast<std::size_t>(t[0])];
      const Vec3 e1 = x[static_cast<std::size_t>(t[1])] - a, e2 = x[static_cast<std::size_t>(t[2])] - a;
      const Vec3 gb = cross(e2, dc[f]);
      const Vec3 gc = cross(dc[f], e1);
      slot[f * 3 + 0] = -(gb + gc);
      slot[f * 3 + 1] = gb;
      slot[f * 3 + 2] = gc;
    });
    grad->assign(x.size(), Vec3{});
    for_each_index(static_cast<std::ptrdiff_t>(x.size()), exec, [&](std::ptrdiff_t v) {
      Vec3 g;
      for (int s : topo.incident_face_slots(static_cast<std::size_t>(v))) g += slot[static_cast<std::size_t>(s)];
      (*grad)[static_cast<std::size_t>(v)] = g;
    });
  }
  return ordered_sum(terms);
}

BarrierValue barrier_l(double det, double v0) {
  if (!(det > 0)) return {kInf, -kInf};
  if (det > v0) return {0.0, 0.0};
  const double d = det - v0;
  const double lg = std::log(det / v0);
  return {-d * d * lg, -2.0 * d * lg - d * d / det};
}

double r_orientation(const MeshTopology& topo, std::span<const Vec3> x, double v0, std::vector<Vec3>* grad,
                     Exec exec) {
  check_positions(topo, x);
  const auto& tets = topo.tets();
  const std::size_t nt = tets.size();
  std::vector<double> terms(nt);
  std::vector<Vec3> slot(grad ? nt * 4 : 0);
  for_each_index(static_cast<std::ptrdiff_t>(nt), exec, [&](std::ptrdiff_t ti) {
    const auto t = static_cast<std::size_t>(ti);
    const auto& T = tets[t];
    const Vec3& p0 = x[static_cast<std::size_t>(T[0])];
    const Vec3& p1 = x[static_cast<std::size_t>(T[1])];
    const Vec3& p2 = x[static_cast<std::size_t>(T[2])];
    const Vec3& p3 = x[static_cast<std::size_t>(T[3])];
    const BarrierValue b = barrier_l(homogeneous_det(p0, p1, p2, p3), v0);
    terms[t] = b.value;
    if (!slot.empty()) {
      if (b.derivative != 0 && std::isfinite(b.derivative)) {
        const auto g = homogeneous_det_gradient(p0, p1, p2, p3);
        for (std::size_t s = 0; s < 4; ++s) slot[t * 4 + s] = g[s] * b.derivative;
      } else {
        for (std::size_t s = 0; s < 4; ++s) slot[t * 4 + s] = Vec3{};
      }
    }
  });
  const double value = ordered_sum(terms);
  if (grad) {
    grad->assign(x.size(), Vec3{});
    if (std::isfinite(value)) {
      for_each_index(static_cast<std::ptrdiff_t>(x.size()), exec, [&](std::ptrdiff_t v) {
        Vec3 g;
        for (int s : topo.incident_tet_slots(static_cast<std::size_t>(v))) g += slot[static_cast<std::size_t>(s)];
        (*grad)[static_cast<std::size_t>(v)] = g;
      });
    }
  }
  return value;
}

double robust_proj(const MeshTopology& topo, std::span<const Vec3> x, std::span<const Vec3> targets,
                   std::span<const Vec3> noise, double k, std::vector<Vec3>* grad, Exec exec) {
  check_positions(topo, x);
  const auto& sv = topo.surface_vertices();
  if (targets.size() != sv.size() || noise.size() != sv.size())
    throw Error("shape", "robust_proj: need one target and one noise vector per surface vertex");
  std::vector<double> terms(sv.size());
  std::vector<Vec3> dir(sv.size());
  for_each_index(static_cast<std::ptrdiff_t>(sv.size()), exec, [&](std::ptrdiff_t si) {
    const auto s = static_cast<std::size_t>(si);
    const Vec3 res = x[static_cast<std::size_t>(sv[s])] - targets[s] + noise[s] * k;
    const double l = norm(res);
    terms[s] = l;
    dir[s] = l > 0 ? res / l : Vec3{};
  });
  if (grad) {
    grad->assign(x.size(), Vec3{});
    for (std::size_t s = 0; s < sv.size(); ++s) (*grad)[static_cast<std::size_t>(sv[s])] = dir[s];
  }
  return ordered_sum(terms);
}

ObjectiveBreakdown evaluate_objective(const MeshTopology& topo, std::span<const Vec3> x, std::span<const Vec3> targets,
                                      std::span<const Vec3> noise, double k, const DeformConfig& cfg,
                                      std::vector<Vec3>* grad, Exec exec) {
  ObjectiveBreakdown b;
  std::vector<Vec3> gp, ge, gl, gn, go;
  const bool g = grad != nullptr;
  b.proj = robust_proj(topo, x, targets, noise, k, g ? &gp : nullptr, exec);
  b.edge = cfg.lambda_a > 0 ? r_edge(topo, x, g ? &ge : nullptr, exec) : 0.0;
  b.laplacian = cfg.lambda_b > 0
                    ? r_laplacian(topo, x, cfg.laplacian_alpha, cfg.laplacian_beta, g ? &gl : nullptr, exec)
                    : 0.0;
  b.normal = cfg.lambda_c > 0 ? r_normal(topo, x, g ? &gn : nullptr, exec) : 0.0;
  b.orientation = cfg.use_barrier ? r_orientation(topo, x, cfg.v0, g ? &go : nullptr, exec) : 0.0;
  b.total = b.proj + cfg.lambda_a * b.edge + cfg.lambda_b * b.laplacian + cfg.lambda_c * b.normal + b.orientation;
  if (g) {
    grad->assign(x.size(), Vec3{});
    for_each_index(static_cast<std::ptrdiff_t>(x.size()), exec, [&](std::ptrdiff_t vi) {
      const auto v = static_cast<std::size_t>(vi);
      Vec3 s = gp[v];
      if (!ge.empty()) s += ge[v] * cfg.lambda_a;
      if (!gl.empty()) s += gl[v] * cfg.lambda_b;
      if (!gn.empty()) s += gn[v] * cfg.lambda_c;
      if (!go.empty()) s += go[v];
      (*grad)[v] = s;
    });
  }
  return b;
}

double min_tet_det(const MeshTopology& topo, std::span<const Vec3> x, Exec exec) {
  check_positions(topo, x);
  const auto& tets = topo.tets();
  std::vector<double> dets(tets.size());
  for_each_index(static_cast<std::ptrdiff_t>(tets.size()), exec, [&](std::ptrdiff_t ti) {
    const auto& T = tets[static_cast<std::size_t>(ti)];
    dets[static_cast<std::size_t>(ti)] = homogeneous_det(x[static_cast<std::size_t>(T[0])], x[static_cast<std::size_t>(T[1])],
                                                         x[static_cast<std::size_t>(T[2])], x[static_cast<std::size_t>(T[3])]);
  });
  double m = kInf;
  for (double d : dets) m = std::min(m, d);
  return m;
}

int first_inverted_tet(const MeshTopology& topo, std::span<const Vec3> x) {
  const auto& tets = topo.tets();
  for (std::size_t t = 0; t < tets.size(); ++t) {
    const auto& T = tets[t];
    if (!(homogeneous_det(x[static_cast<std::size_t>(T[0])], x[static_cast<std::size_t>(T[1])],
                          x[static_cast<std::size_t>(T[2])], x[static_cast<std::size_t>(T[3])]) > 0))
      return static_cast<int>(t);
  }
  return -1;
}

DeformResult optimize(const TetMesh& mesh, const VoxelGrid& grid, const ClosestPointPredictor& predictor,
                      const DeformConfig& cfg, Exec exec) {
  cfg.validate();
  const MeshTopology topo(mesh);
  const auto& sv = topo.surface_vertices();
  if (sv.empty()) throw Error("empty", "mesh has no surface vertices");

  std::vector<Vec3> x = mesh.vertices;
  if (cfg.use_barrier && !(min_tet_det(topo, x, exec) > 0))
    throw Error("inverted", "initial mesh has a tet with det(M) <= 0");

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  const std::size_t n = x.size();
  std::vector<Vec3> m(n), v(n), grad, dir(n), trial(n);
  std::vector<Vec3> queries(sv.size()), targets(sv.size()), noise(sv.size());

  DeformResult result;
  result.trace.reserve(static_cast<std::size_t>(cfg.steps));
  double bias1 = 1.0, bias2 = 1.0;
  for (int step = 0; step < cfg.steps; ++step) {
    const double k = cfg.noise_at(step);
    for (std::size_t s = 0; s < sv.size(); ++s) queries[s] = x[static_cast<std::size_t>(sv[s])];
    predictor.predict_batch(grid, queries, targets, exec);
    for (const auto& t : targets)
      if (!is_finite(t)) throw Error("nan", "closest-point predictor returned a non-finite point");
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(step)));
    for (auto& nz : noise) nz = {standard_normal(rng), standard_normal(rng), standard_normal(rng)};

    TraceRow row;
    row.step = step;
    row.k = k;
    row.objective = evaluate_objective(topo, x, targets, noise, k, cfg, &grad, exec);
    row.min_det = min_tet_det(topo, x, exec);
    result.trace.push_back(row);
    for (const auto& g : grad)
      if (!is_finite(g)) throw Error("nan", "non-finite gradient at step " + std::to_string(step));

    bias1 *= kBeta1;
    bias2 *= kBeta2;
    for_each_index(static_cast<std::ptrdiff_t>(n), exec, [&](std::ptrdiff_t ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (int a = 0; a < 3; ++a) {
        m[i][a] = kBeta1 * m[i][a] + (1 - kBeta1) * grad[i][a];
        v[i][a] = kBeta2 * v[i][a] + (1 - kBeta2) * grad[i][a] * grad[i][a];
        const double mh = m[i][a] / (1 - bias1), vh = v[i][a] / (1 - bias2);
        dir[i][a] = mh / (std::sqrt(vh) + kEps);
      }
    });

    double lr = cfg.step_size;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      for_each_index(static_cast<std::ptrdiff_t>(n), exec,
                     [&](std::ptrdiff_t i) { trial[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - dir[static_cast<std::size_t>(i)] * lr; });
      if (!cfg.use_barrier || min_tet_det(topo, trial, exec) > 0) {
        accepted = true;
        break;
      }
      lr *= 0.5;
      ++result.halvings;
    }
    if (!accepted) {
      throw Error("backtrack", "step " + std::to_string(step) + ": backtracking exhausted; tet " +
                                   std::to_string(first_inverted_tet(topo, trial)) + " stays inverted");
    }
    x.swap(trial);
  }
  result.mesh = mesh;
  result.mesh.vertices = std::move(x);
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "step,total,proj,edge,laplacian,normal,orientation,k,min_det\n" << std::setprecision(17);
  for (const auto& r : trace) {
    const auto& o = r.objective;
    out << r.step << ',' << o.total << ',' << o.proj << ',' << o.edge << ',' << o.laplacian << ',' << o.normal << ','
        << o.orientation << ',' << r.k << ',' << r.min_det << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  write_trace_csv(out, trace);
}

}  // namespace nvmg
