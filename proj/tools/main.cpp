// cardio-amg: Bidomain simulator and AMG preconditioner laboratory.
//
// Subcommands: mesh gen-ellipsoid | mesh gen-box | mesh info,
// simulate, sweep, refine, schema.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "cardio/config.hpp"
#include "cardio/harness.hpp"
#include "cardio/mesh.hpp"
#include "cardio/stepper.hpp"

namespace {

cardio::Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  cardio::Config cfg = path.empty() ? cardio::Config() : cardio::Config::load(path);
  for (const std::string& kv : overrides) cfg.apply_override(kv);
  return cfg;
}

void print_mesh_info(const cardio::HexMesh& mesh) {
  const char* kind = mesh.info.kind == cardio::MeshKind::Box ? "box"
                     : mesh.info.kind == cardio::MeshKind::Ellipsoid ? "ellipsoid"
                                                                     : "external";
  std::printf("kind:      %s\n", kind);
  std::printf("cells:     %d x %d x %d\n", mesh.info.cells[0], mesh.info.cells[1],
              mesh.info.cells[2]);
  std::printf("nodes:     %zu\n", mesh.n_nodes());
  std::printf("elements:  %zu\n", mesh.n_elements());
  std::printf("dofs:      %zu (v and u_e per node)\n", 2 * mesh.n_nodes());
  std::printf("volume:    %.6g cm^3\n", mesh.volume());
  cardio::Vec3 lo = mesh.nodes.front(), hi = mesh.nodes.front();
  for (const cardio::Vec3& p : mesh.nodes) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  std::printf("bounds:    [%.4g, %.4g] x [%.4g, %.4g] x [%.4g, %.4g] cm\n", lo.x, hi.x, lo.y, hi.y,
              lo.z, hi.z);
  double worst = 0.0;
  for (const cardio::FiberFrame& f : mesh.element_fibers)
    worst = std::max(worst, f.orthonormality_defect());
  std::printf("fiber orthonormality defect: %.3g\n", worst);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardiac Bidomain simulator with an in-house AMG preconditioner"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  // --- mesh ------------------------------------------------------------
  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate or inspect meshes");
  mesh_cmd->require_subcommand(1);

  struct {
    int n_theta = 32, n_phi = 32, n_r = 16;
    cardio::EllipsoidParams params;
    double endo_deg = 60.0, epi_deg = -60.0;
    std::string out;
    std::string format = "binary";
  } gen_lv;
  CLI::App* lv = mesh_cmd->add_subcommand("gen-ellipsoid", "truncated-ellipsoid ventricle mesh");
  lv->add_option("--n-theta", gen_lv.n_theta, "circumferential cells")->check(CLI::PositiveNumber);
  lv->add_option("--n-phi", gen_lv.n_phi, "latitudinal cells")->check(CLI::PositiveNumber);
  lv->add_option("--n-r", gen_lv.n_r, "transmural cells")->check(CLI::PositiveNumber);
  lv->add_option("--a1", gen_lv.params.a1);
  lv->add_option("--a2", gen_lv.params.a2);
  lv->add_option("--b1", gen_lv.params.b1);
  lv->add_option("--b2", gen_lv.params.b2);
  lv->add_option("--c1", gen_lv.params.c1);
  lv->add_option("--c2", gen_lv.params.c2);
  lv->add_option("--theta-min", gen_lv.params.theta_min);
  lv->add_option("--theta-max", gen_lv.params.theta_max);
  lv->add_option("--phi-min", gen_lv.params.phi_min);
  lv->add_option("--phi-max", gen_lv.params.phi_max);
  lv->add_option("--endo-deg", gen_lv.endo_deg, "fiber angle at r=0");
  lv->add_option("--epi-deg", gen_lv.epi_deg, "fiber angle at r=1");
  lv->add_option("--out", gen_lv.out, "output path")->required();
  lv->add_option("--format", gen_lv.format, "binary | text")
      ->check(CLI::IsMember({"binary", "text"}));

  struct {
    int nx = 16, ny = 16, nz = 16;
    double lx = 1.0, ly = 1.0, lz = 1.0;
    std::string out;
    std::string format = "binary";
  } gen_box;
  CLI::App* box = mesh_cmd->add_subcommand("gen-box", "axis-aligned box mesh");
  box->add_option("--nx", gen_box.nx)->check(CLI::PositiveNumber);
  box->add_option("--ny", gen_box.ny)->check(CLI::PositiveNumber);
  box->add_option("--nz", gen_box.nz)->check(CLI::PositiveNumber);
  box->add_option("--lx", gen_box.lx)->check(CLI::PositiveNumber);
  box->add_option("--ly", gen_box.ly)->check(CLI::PositiveNumber);
  box->add_option("--lz", gen_box.lz)->check(CLI::PositiveNumber);
  box->add_option("--out", gen_box.out, "output path")->required();
  box->add_option("--format", gen_box.format, "binary | text")
      ->check(CLI::IsMember({"binary", "text"}));

  std::string info_path;
  CLI::App* info = mesh_cmd->add_subcommand("info", "print mesh statistics");
  info->add_option("path", info_path, "mesh file")->required();

  // --- experiments -------------------------------------------------------
  CLI::App* simulate = app.add_subcommand("simulate", "run a Bidomain simulation");
  simulate->add_option("--config", config_path, "config file (key = value)");
  simulate->add_option("--set", overrides, "override, e.g. --set time.t_end_ms=5");

  std::string branch = "mis";
  std::string values_csv;
  CLI::App* sweep = app.add_subcommand("sweep", "AMG threshold calibration sweep");
  sweep->add_option("--config", config_path, "config file");
  sweep->add_option("--set", overrides, "config override");
  sweep->add_option("--branch", branch, "mis | strong")
      ->check(CLI::IsMember({"mis", "strong"}));
  sweep->add_option("--values", values_csv, "comma-separated threshold values")->required();

  std::string sizes_csv = "8,16,32";
  std::string solvers_csv = "amg-mis";
  CLI::App* refine = app.add_subcommand("refine", "iteration scalability across refinements");
  refine->add_option("--config", config_path, "config file");
  refine->add_option("--set", overrides, "config override");
  refine->add_option("--sizes", sizes_csv, "ascending mesh sizes, e.g. 8,16,32");
  refine->add_option("--solvers", solvers_csv, "amg-mis | amg-strong | identity list");

  CLI::App* schema = app.add_subcommand("schema", "print all config keys and defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lv->parsed()) {
      cardio::HexMesh mesh =
          cardio::generate_ellipsoid_mesh(gen_lv.params, gen_lv.n_theta, gen_lv.n_phi, gen_lv.n_r);
      cardio::assign_fibers(mesh, gen_lv.endo_deg * M_PI / 180.0, gen_lv.epi_deg * M_PI / 180.0);
      cardio::save_mesh(mesh, gen_lv.out,
                        gen_lv.format == "text" ? cardio::MeshFileFormat::Text
                                                : cardio::MeshFileFormat::Binary);
      std::printf("wrote %s (%zu nodes, %zu elements, %zu dofs)\n", gen_lv.out.c_str(),
                  mesh.n_nodes(), mesh.n_elements(), 2 * mesh.n_nodes());
    } else if (box->parsed()) {
      const cardio::HexMesh mesh = cardio::generate_box_mesh(
          {gen_box.lx, gen_box.ly, gen_box.lz}, {gen_box.nx, gen_box.ny, gen_box.nz});
      cardio::save_mesh(mesh, gen_box.out,
                        gen_box.format == "text" ? cardio::MeshFileFormat::Text
                                                 : cardio::MeshFileFormat::Binary);
      std::printf("wrote %s (%zu nodes, %zu elements)\n", gen_box.out.c_str(), mesh.n_nodes(),
                  mesh.n_elements());
    } else if (info->parsed()) {
      print_mesh_info(cardio::load_mesh(info_path));
    } else if (simulate->parsed()) {
      const cardio::Config cfg = load_config(config_path, overrides);
      const cardio::SimulateResult res = cardio::run_simulate(cfg);
      std::cout << res.summary_text;
      if (!res.simulation.trace_path.empty())
        std::cout << "trace:   " << res.simulation.trace_path << "\n";
      if (!res.summary_json_path.empty()) std::cout << "summary: " << res.summary_json_path << "\n";
      if (!res.simulation.snapshot_paths.empty())
        std::cout << "snapshots: " << res.simulation.snapshot_paths.size() << " files\n";
    } else if (sweep->parsed()) {
      const cardio::Config cfg = load_config(config_path, overrides);
      const cardio::CoarseningKind kind = branch == "mis"
                                              ? cardio::CoarseningKind::MisAggregation
                                              : cardio::CoarseningKind::StrongThreshold;
      const cardio::SweepResult res =
          cardio::run_threshold_sweep(cfg, kind, cardio::parse_double_list(values_csv));
      std::cout << res.table.to_aligned_text();
      if (!res.csv_path.empty()) std::cout << "table: " << res.csv_path << "\n";
      for (const auto& v : res.values)
        if (v.failed) return 2;
    } else if (refine->parsed()) {
      const cardio::Config cfg = load_config(config_path, overrides);
      std::vector<std::string> solvers;
      {
        std::istringstream in(solvers_csv);
        std::string tok;
        while (std::getline(in, tok, ','))
          if (!tok.empty()) solvers.push_back(tok);
      }
      const cardio::RefinementResult res =
          cardio::run_refinement_study(cfg, cardio::parse_int_list(sizes_csv), solvers);
      std::cout << res.table.to_aligned_text();
      if (!res.csv_path.empty()) std::cout << "table: " << res.csv_path << "\n";
      for (const auto& r : res.rows)
        if (r.failed) return 2;
    } else if (schema->parsed()) {
      std::cout << cardio::Config::schema_text();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
