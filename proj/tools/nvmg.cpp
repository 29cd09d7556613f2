#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nvmg/closest_point.hpp"
#include "nvmg/deform.hpp"
#include "nvmg/diffusion.hpp"
#include "nvmg/mesh_io.hpp"
#include "nvmg/quality.hpp"
#include "nvmg/shapes.hpp"
#include "nvmg/tet_mesh.hpp"
#include "nvmg/voxel_grid.hpp"

namespace fs = std::filesystem;
using namespace nvmg;

namespace {

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error("missing_file", "no such file: " + p.string());
}

std::string extension(const fs::path& p) {
  std::string e = p.extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

void require_extension(const fs::path& p, std::initializer_list<const char*> allowed) {
  const std::string e = extension(p);
  for (const char* a : allowed)
    if (e == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw Error("usage", "output " + p.string() + " must end in one of: " + list);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
  if (!out) throw Error("io", "failed writing " + path.string());
}

void write_tet_output(const fs::path& path, const TetMesh& mesh) {
  if (extension(path) == ".vtk")
    write_vtk(path, mesh);
  else
    write_medit(path, mesh);
}

TetMesh read_tet_input(const fs::path& path) {
  require_file(path);
  if (extension(path) == ".vox") return build_tet_mesh(read_grid(path));
  return read_medit(path);
}

// --- voxelize ---------------------------------------------------------------

struct VoxelizeArgs {
  std::string input, output;
  int resolution = 32;
  bool shell = false;
};

void run_voxelize(const VoxelizeArgs& a) {
  require_file(a.input);
  require_extension(a.output, {".vox"});
  if (a.resolution < 2 || a.resolution > 64) throw Error("range", "resolution must lie in [2, 64]");
  const TriMesh surface = read_surface(a.input);
  VoxelizeOptions opts;
  opts.shell = a.shell;
  const VoxelGrid grid = voxelize_mesh(surface, a.resolution, opts);
  write_grid(fs::path(a.output), grid);
  std::cout << "occupied " << grid.count() << " of " << grid.size() << "\n";
}

// --- tetmesh ----------------------------------------------------------------

struct TetmeshArgs {
  std::string input, output, surface;
};

void run_tetmesh(const TetmeshArgs& a) {
  require_file(a.input);
  require_extension(a.output, {".mesh", ".vtk"});
  if (!a.surface.empty()) require_extension(a.surface, {".obj"});
  const TetMesh mesh = build_tet_mesh(read_grid(fs::path(a.input)));
  write_tet_output(a.output, mesh);
  if (!a.surface.empty()) write_surface_obj(a.surface, mesh);
  std::cout << "vertices " << mesh.num_vertices() << " tets " << mesh.num_tets() << " surface_tris "
            << mesh.surface_tris.size() << "\n";
}

// --- deform -----------------------------------------------------------------

struct DeformArgs {
  std::string input, oracle, config, output, trace, surface, report;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> step_size, lambda_a, lambda_b, lambda_c, k0;
  bool no_barrier = false;
};

void run_deform(const DeformArgs& a) {
  require_file(a.input);
  require_file(a.oracle);
  require_extension(a.output, {".mesh", ".vtk"});
  if (!a.surface.empty()) require_extension(a.surface, {".obj"});

  DeformConfig cfg;
  if (!a.config.empty()) {
    require_file(a.config);
    cfg = load_deform_config(a.config);
  }
  if (a.steps) cfg.steps = *a.steps;
  if (a.seed) cfg.seed = *a.seed;
  if (a.step_size) cfg.step_size = *a.step_size;
  if (a.lambda_a) cfg.lambda_a = *a.lambda_a;
  if (a.lambda_b) cfg.lambda_b = *a.lambda_b;
  if (a.lambda_c) cfg.lambda_c = *a.lambda_c;
  if (a.k0) cfg.k0 = *a.k0;
  if (a.no_barrier) cfg.use_barrier = false;
  cfg.validate();

  const VoxelGrid grid = read_grid(fs::path(a.input));
  const TriMesh reference = surface_in_lattice(read_surface(a.oracle), grid.frame());
  const TetMesh mesh = build_tet_mesh(grid);
  const ExactClosestPoint predictor(std::make_shared<const TriangleBvh>(reference));
  const DeformResult result = optimize(mesh, grid, predictor, cfg);

  const fs::path out_dir = fs::absolute(a.output).parent_path();
  write_tet_output(a.output, result.mesh);
  if (!a.surface.empty()) write_surface_obj(a.surface, result.mesh);
  if (!a.trace.empty()) write_trace_csv(fs::path(a.trace), result.trace);
  if (!a.report.empty()) write_text(a.report, quality_report_json(quality_report(result.mesh)));
  write_text(out_dir / "effective_config.json", deform_config_to_json(cfg));

  const auto& last = result.trace.back();
  std::cout << "steps " << result.trace.size() << " halvings " << result.halvings << " final_total "
            << last.objective.total << " min_det " << last.min_det << "\n";
}

// --- quality ----------------------------------------------------------------

struct QualityArgs {
  std::vector<std::string> inputs;
  std::string output;
};

void run_quality(const QualityArgs& a) {
  for (const auto& p : a.inputs) require_file(p);
  if (!a.output.empty()) require_extension(a.output, {".json"});
  std::vector<std::pair<std::string, QualityReport>> rows;
  for (const auto& p : a.inputs) rows.emplace_back(fs::path(p).filename().string(), quality_report(read_tet_input(p)));

  if (rows.size() == 1) {
    if (!a.output.empty()) write_text(a.output, quality_report_json(rows[0].second));
    write_quality_table(std::cout, rows);
    return;
  }
  std::vector<QualityReport> reports;
  for (const auto& [_, r] : rows) reports.push_back(r);
  const BatchReport b = batch_report(reports);
  if (!a.output.empty()) {
    nlohmann::ordered_json j;
    j["n_meshes"] = b.n_meshes;
    j["tri_ar_mean"] = b.tri_ar_mean;
    j["tri_ar_min"] = b.tri_ar_min;
    j["tri_ar_max"] = b.tri_ar_max;
    j["tet_ar_mean"] = b.tet_ar_mean;
    j["tet_ar_min"] = b.tet_ar_min;
    j["tet_ar_max"] = b.tet_ar_max;
    j["tri_flip"] = b.tri_flip;
    j["tet_flip"] = b.tet_flip;
    j["self_intersection"] = b.self_intersection;
    write_text(a.output, j.dump(2) + "\n");
  }
  write_quality_table(std::cout, rows);
  std::cout << '\n';
  const std::vector<std::pair<std::string, BatchReport>> batch{{"batch", b}};
  write_batch_table(std::cout, batch);
}

// --- edit -------------------------------------------------------------------

struct EditArgs {
  std::string input, output, combine, op = "union";
  std::vector<int> lo, hi;
  int value = 1;
};

void run_edit(const EditArgs& a) {
  require_file(a.input);
  require_extension(a.output, {".vox"});
  const VoxelGrid grid = read_grid(fs::path(a.input));
  VoxelGrid out;
  if (!a.combine.empty()) {
    if (!a.lo.empty() || !a.hi.empty()) throw Error("usage", "--combine cannot be used with --lo/--hi");
    require_file(a.combine);
    out = combine(grid, read_grid(fs::path(a.combine)), parse_combine_op(a.op));
  } else {
    if (a.lo.size() != 3 || a.hi.size() != 3) throw Error("usage", "edit needs --lo X Y Z and --hi X Y Z, or --combine");
    if (a.value != 0 && a.value != 1) throw Error("usage", "--value must be 0 or 1");
    out = edit_region(grid, {a.lo[0], a.lo[1], a.lo[2]}, {a.hi[0], a.hi[1], a.hi[2]}, a.value == 1);
  }
  write_grid(fs::path(a.output), out);
  std::cout << "occupied " << out.count() << " of " << out.size() << "\n";
}

// --- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string output, denoiser = "zero", target;
  int resolution = 16;
  int steps = 1000;
  std::uint64_t seed = 0;
  double threshold = 0.0, mean = 0.0, variance = 1.0;
};

void run_sample(const SampleArgs& a) {
  require_extension(a.output, {".vox"});
  if (a.resolution < 1 || a.resolution > 64) throw Error("range", "resolution must lie in [1, 64]");
  std::unique_ptr<Denoiser> denoiser;
  int resolution = a.resolution;
  if (a.denoiser == "zero") {
    denoiser = std::make_unique<ZeroDenoiser>();
  } else if (a.denoiser == "gaussian") {
    denoiser = std::make_unique<GaussianDenoiser>(a.mean, a.variance);
  } else if (a.denoiser == "target") {
    if (a.target.empty()) throw Error("usage", "--denoiser target needs --target grid.vox");
    require_file(a.target);
    const VoxelGrid target = read_grid(fs::path(a.target));
    resolution = target.resolution();
    denoiser = std::make_unique<TargetDenoiser>(encode_grid(target));
  } else {
    throw Error("usage", "unknown denoiser '" + a.denoiser + "' (zero, gaussian, target)");
  }
  const NoiseSchedule sched = linear_schedule(a.steps);
  Rng rng(a.seed);
  const VoxelGrid grid = sample_grid(*denoiser, sched, resolution, rng, a.threshold);
  write_grid(fs::path(a.output), grid);
  std::cout << "occupied " << grid.count() << " of " << grid.size() << "\n";
}

// --- gen-cp-data ------------------------------------------------------------

struct CpDataArgs {
  std::string input, oracle, output;
  std::size_t n = 75000;
  double sigma = 0.5;
  std::uint64_t seed = 0;
};

void run_gen_cp_data(const CpDataArgs& a) {
  require_file(a.input);
  require_file(a.oracle);
  if (a.n < 1) throw Error("range", "-n must be >= 1");
  if (!(a.sigma >= 0)) throw Error("range", "--sigma must be >= 0");
  const VoxelGrid grid = read_grid(fs::path(a.input));
  const TriangleBvh bvh(surface_in_lattice(read_surface(a.oracle), grid.frame()));
  SampleOptions opts;
  opts.jitter_sigma = a.sigma;
  opts.seed = a.seed;
  const auto samples = gen_training_samples(build_tet_mesh(grid), bvh, a.n, opts);
  write_samples(fs::path(a.output), samples);
  std::cout << "samples " << samples.size() << "\n";
}

// --- primitive --------------------------------------------------------------

struct PrimitiveArgs {
  std::string kind, output;
  int subdivisions = 4;
};

void run_primitive(const PrimitiveArgs& a) {
  require_extension(a.output, {".obj"});
  TriMesh m;
  if (a.kind == "sphere")
    m = icosphere(a.subdivisions);
  else if (a.kind == "torus")
    m = torus(0.35, 0.1, 64, 24);
  else if (a.kind == "box")
    m = box({0, 0, 0}, {1, 1, 1});
  else if (a.kind == "chair")
    m = chair();
  else
    throw Error("usage", "unknown primitive '" + a.kind + "' (sphere, torus, box, chair)");
  write_obj(fs::path(a.output), m);
  std::cout << "vertices " << m.vertices.size() << " faces " << m.faces.size() << "\n";
}

int report_error(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel to tetrahedral mesh pipeline"};
  app.require_subcommand(1);

  VoxelizeArgs vox;
  auto* c_vox = app.add_subcommand("voxelize", "Voxelize a closed OBJ/OFF surface into a .vox grid");
  c_vox->add_option("input", vox.input, "Surface mesh (.obj or .off)")->required();
  c_vox->add_option("-r,--resolution", vox.resolution, "Grid resolution r");
  c_vox->add_option("-o,--output", vox.output, "Output .vox")->required();
  c_vox->add_flag("--shell", vox.shell, "Keep only boundary voxels");

  TetmeshArgs tet;
  auto* c_tet = app.add_subcommand("tetmesh", "Split a voxel grid into tetrahedra");
  c_tet->add_option("input", tet.input, "Input .vox")->required();
  c_tet->add_option("-o,--output", tet.output, "Output .mesh or .vtk")->required();
  c_tet->add_option("--surface", tet.surface, "Also write the boundary surface as OBJ");

  DeformArgs def;
  auto* c_def = app.add_subcommand("deform", "Deform the tet mesh of a grid onto a reference surface");
  c_def->add_option("input", def.input, "Input .vox")->required();
  c_def->add_option("--oracle", def.oracle, "Reference surface the grid was voxelized from")->required();
  c_def->add_option("-c,--config", def.config, "JSON config with DeformConfig fields");
  c_def->add_option("-o,--output", def.output, "Output .mesh or .vtk")->required();
  c_def->add_option("--trace", def.trace, "Per-step loss trace CSV");
  c_def->add_option("--surface", def.surface, "Deformed boundary surface OBJ");
  c_def->add_option("--report", def.report, "Quality report JSON of the result");
  c_def->add_option("--steps", def.steps);
  c_def->add_option("--seed", def.seed);
  c_def->add_option("--step-size", def.step_size);
  c_def->add_option("--lambda-a", def.lambda_a);
  c_def->add_option("--lambda-b", def.lambda_b);
  c_def->add_option("--lambda-c", def.lambda_c);
  c_def->add_option("--k0", def.k0);
  c_def->add_flag("--no-barrier", def.no_barrier, "Disable the orientation term and flip rejection");

  QualityArgs qa;
  auto* c_q = app.add_subcommand("quality", "Quality report of one mesh, or batch statistics of several");
  c_q->add_option("inputs", qa.inputs, "Input .mesh or .vox files")->required();
  c_q->add_option("-o,--output", qa.output, "Report JSON");

  EditArgs ed;
  auto* c_ed = app.add_subcommand("edit", "Set a box of voxels, or combine two grids");
  c_ed->add_option("input", ed.input, "Input .vox")->required();
  c_ed->add_option("-o,--output", ed.output, "Output .vox")->required();
  c_ed->add_option("--lo", ed.lo)->expected(3);
  c_ed->add_option("--hi", ed.hi)->expected(3);
  c_ed->add_option("--value", ed.value);
  c_ed->add_option("--combine", ed.combine, "Second .vox operand");
  c_ed->add_option("--op", ed.op, "union, difference or intersection");

  SampleArgs sa;
  auto* c_sa = app.add_subcommand("sample", "Run the reverse diffusion chain into a voxel grid");
  c_sa->add_option("-o,--output", sa.output, "Output .vox")->required();
  c_sa->add_option("-r,--resolution", sa.resolution);
  c_sa->add_option("--denoiser", sa.denoiser, "zero, gaussian or target");
  c_sa->add_option("--target", sa.target, "Grid reproduced by the target denoiser");
  c_sa->add_option("--mean", sa.mean, "Gaussian denoiser data mean");
  c_sa->add_option("--variance", sa.variance, "Gaussian denoiser data variance");
  c_sa->add_option("--steps", sa.steps, "Schedule length T");
  c_sa->add_option("--seed", sa.seed);
  c_sa->add_option("--threshold", sa.threshold);

  CpDataArgs cp;
  auto* c_cp = app.add_subcommand("gen-cp-data", "Generate closest-point training samples");
  c_cp->add_option("input", cp.input, "Input .vox")->required();
  c_cp->add_option("--oracle", cp.oracle, "Reference surface")->required();
  c_cp->add_option("-o,--output", cp.output, "Output sample file")->required();
  c_cp->add_option("-n", cp.n);
  c_cp->add_option("--sigma", cp.sigma, "Jitter sigma in voxel units");
  c_cp->add_option("--seed", cp.seed);

  PrimitiveArgs pr;
  auto* c_pr = app.add_subcommand("primitive", "Write a test surface (sphere, torus, box, chair)");
  c_pr->add_option("kind", pr.kind)->required();
  c_pr->add_option("-o,--output", pr.output)->required();
  c_pr->add_option("--subdivisions", pr.subdivisions);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  try {
    if (c_vox->parsed()) run_voxelize(vox);
    else if (c_tet->parsed()) run_tetmesh(tet);
    else if (c_def->parsed()) run_deform(def);
    else if (c_q->parsed()) run_quality(qa);
    else if (c_ed->parsed()) run_edit(ed);
    else if (c_sa->parsed()) run_sample(sa);
    else if (c_cp->parsed()) run_gen_cp_data(cp);
    else if (c_pr->parsed()) run_primitive(pr);
  } catch (const Error& e) {
    return report_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
