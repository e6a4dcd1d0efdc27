#include "cardio/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cardio {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::string branch_name(CoarseningKind kind) {
  return kind == CoarseningKind::MisAggregation ? "mis" : "strong";
}

SmootherConfig smoother_from(const Config& cfg) {
  SmootherConfig s;
  const std::string kind = cfg.get_string("smoother.kind");
  if (kind == "chebyshev")
    s.kind = SmootherKind::Chebyshev;
  else if (kind == "jacobi")
    s.kind = SmootherKind::WeightedJacobi;
  else if (kind == "sgs")
    s.kind = SmootherKind::SymmetricGaussSeidel;
  else
    throw ConfigError("smoother.kind must be chebyshev, jacobi or sgs (got '" + kind + "')");
  s.jacobi_omega = cfg.get_double("smoother.jacobi_omega");
  s.cheb_degree = cfg.get_int("smoother.degree");
  s.eig_lo_frac = cfg.get_double("smoother.eig_lo_frac");
  s.eig_hi_frac = cfg.get_double("smoother.eig_hi_frac");
  s.esteig_iters = cfg.get_int("smoother.esteig_iters");
  return s;
}

Stimulus stimulus_from(const Config& cfg, const HexMesh& mesh) {
  Vec3 center;
  const std::string center_value = cfg.get_string("stimulus.center");
  if (center_value == "auto") {
    center = default_stimulus_center(mesh);
  } else {
    std::istringstream in(center_value);
    if (!(in >> center.x >> center.y >> center.z))
      throw ConfigError("stimulus.center must be 'auto' or three coordinates");
  }
  return make_ball_stimulus(center, cfg.get_double("stimulus.radius_cm"),
                            cfg.get_double("stimulus.start_ms"),
                            cfg.get_double("stimulus.duration_ms"),
                            cfg.get_double("stimulus.amplitude"));
}

ConductivitySet conductivity_from(const Config& cfg) {
  ConductivitySet s;
  s.sigma_l_i = cfg.get_double("conductivity.sigma_l_i");
  s.sigma_t_i = cfg.get_double("conductivity.sigma_t_i");
  s.sigma_n_i = cfg.get_double("conductivity.sigma_n_i");
  s.sigma_l_e = cfg.get_double("conductivity.sigma_l_e");
  s.sigma_t_e = cfg.get_double("conductivity.sigma_t_e");
  s.sigma_n_e = cfg.get_double("conductivity.sigma_n_e");
  return s;
}

SimulationOutput output_from(const Config& cfg) {
  SimulationOutput out;
  out.t_end_ms = cfg.get_double("time.t_end_ms");
  out.snapshot_every_steps = cfg.get_int("output.snapshot_every_steps");
  out.output_dir = cfg.get_string("output.dir");
  out.trace_name = cfg.get_string("output.trace");
  const std::string timings = cfg.get_string("output.timings");
  if (timings != "wall" && timings != "none")
    throw ConfigError("output.timings must be wall or none");
  out.write_timings = timings == "wall";
  return out;
}

}  // namespace

HexMesh build_mesh(const Config& cfg) {
  const std::string kind = cfg.get_string("mesh.kind");
  const std::array<int, 3> n = {cfg.get_int("mesh.n1"), cfg.get_int("mesh.n2"),
                                cfg.get_int("mesh.n3")};
  HexMesh mesh;
  if (kind == "ellipsoid") {
    EllipsoidParams p;
    p.a1 = cfg.get_double("mesh.a1");
    p.a2 = cfg.get_double("mesh.a2");
    p.b1 = cfg.get_double("mesh.b1");
    p.b2 = cfg.get_double("mesh.b2");
    p.c1 = cfg.get_double("mesh.c1");
    p.c2 = cfg.get_double("mesh.c2");
    p.theta_min = cfg.get_double("mesh.theta_min");
    p.theta_max = cfg.get_double("mesh.theta_max");
    p.phi_min = cfg.get_double("mesh.phi_min");
    p.phi_max = cfg.get_double("mesh.phi_max");
    mesh = generate_ellipsoid_mesh(p, n[0], n[1], n[2]);
  } else if (kind == "box") {
    mesh = generate_box_mesh(
        {cfg.get_double("mesh.lx"), cfg.get_double("mesh.ly"), cfg.get_double("mesh.lz")}, n);
  } else if (kind == "file") {
    mesh = load_mesh(cfg.get_string("mesh.path"));
    return mesh;  // keep the fibers stored in the file
  } else {
    throw ConfigError("mesh.kind must be ellipsoid, box or file (got '" + kind + "')");
  }
  assign_fibers(mesh, cfg.get_double("fibers.endo_deg") * kDegToRad,
                cfg.get_double("fibers.epi_deg") * kDegToRad);
  return mesh;
}

Experiment build_experiment(const Config& cfg) {
  Experiment exp;
  exp.systems = assemble_bidomain(build_mesh(cfg), conductivity_from(cfg));

  RogersMcCullochParams params;
  params.g = cfg.get_double("ionic.g");
  params.v_th = cfg.get_double("ionic.v_th");
  params.v_p = cfg.get_double("ionic.v_p");
  params.eta1 = cfg.get_double("ionic.eta1");
  params.eta2 = cfg.get_double("ionic.eta2");
  params.eta3 = cfg.get_double("ionic.eta3");
  exp.model = make_ionic_model(cfg.get_string("ionic.model"), params);

  exp.stimulus = stimulus_from(cfg, exp.systems.mesh);
  exp.options.dt_ms = cfg.get_double("time.dt_ms");
  exp.options.c_m = cfg.get_double("membrane.c_m");
  exp.options.rtol = cfg.get_double("solver.rtol");
  exp.options.maxit = cfg.get_int("solver.maxit");
  exp.options.current_scale = cfg.get_double("membrane.current_scale");
  return exp;
}

AmgConfig amg_config_from(const Config& cfg) {
  AmgConfig a;
  const std::string branch = cfg.get_string("amg.branch");
  if (branch == "mis")
    a.coarsening = CoarseningKind::MisAggregation;
  else if (branch == "strong")
    a.coarsening = CoarseningKind::StrongThreshold;
  else
    throw ConfigError("amg.branch must be mis or strong (got '" + branch + "')");
  a.threshold = cfg.get_double("amg.threshold");
  a.strong_alpha = cfg.get_double("amg.strong_threshold");
  a.prolongator_smoothing_steps = cfg.get_int("amg.nsmooths");
  a.smoother = smoother_from(cfg);
  a.mu1 = cfg.get_int("amg.mu1");
  a.mu2 = cfg.get_int("amg.mu2");
  a.coarse_eq_limit = cfg.get_int("amg.coarse_eq_limit");
  a.max_levels = cfg.get_int("amg.max_levels");
  a.validate();
  return a;
}

std::unique_ptr<Preconditioner> make_elliptic_preconditioner(const Config& cfg,
                                                             const BidomainSystems& sys) {
  const std::string kind = cfg.get_string("elliptic.preconditioner");
  if (kind == "identity") return std::make_unique<IdentityPreconditioner>();
  if (kind != "amg")
    throw ConfigError("elliptic.preconditioner must be amg or identity (got '" + kind + "')");
  auto hierarchy = std::make_shared<AmgHierarchy>(amg_setup(sys.a_sum, amg_config_from(cfg)));
  return std::make_unique<AmgPreconditioner>(std::move(hierarchy));
}

std::unique_ptr<Preconditioner> make_parabolic_preconditioner(const Config& cfg,
                                                              const CsrMatrix& parabolic_op) {
  const std::string kind = cfg.get_string("parabolic.preconditioner");
  if (kind == "identity") return std::make_unique<IdentityPreconditioner>();
  if (kind != "block_jacobi")
    throw ConfigError("parabolic.preconditioner must be block_jacobi or identity (got '" + kind +
                      "')");
  int n_blocks = cfg.get_int("parabolic.n_blocks");
  if (n_blocks <= 0) n_blocks = std::max(1, (parabolic_op.n_rows + 63) / 64);
  return std::make_unique<BlockJacobiPreconditioner>(parabolic_op, n_blocks);
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

namespace {

// One simulation window with a prepared elliptic preconditioner; used by the
// sweep and refinement drivers.
SummaryStats run_window(const Experiment& exp, const Preconditioner& eprec, const Config& cfg,
                        const std::string& trace_path) {
  const CsrMatrix pop = parabolic_matrix(exp.systems, exp.options.c_m, exp.options.dt_ms);
  const auto pprec = make_parabolic_preconditioner(cfg, pop);
  const StepperContext ctx = make_stepper_context(exp.systems, *exp.model, eprec, *pprec,
                                                  exp.stimulus, exp.options);

  SimulationOutput out = output_from(cfg);
  out.output_dir.clear();  // the driver writes its own artifacts
  out.snapshot_every_steps = 0;
  const SimulationResult res = run_simulation(ctx, out);
  if (!trace_path.empty())
    write_trace_csv(trace_path, res.trace, cfg.get_string("output.timings") == "wall");
  return res.summary;
}

std::vector<std::string> sweep_row(double value, long dofs, const SweepValueResult& r) {
  if (r.failed)
    return {format_double(value), std::to_string(dofs), "", "", "", "", "", "", "",
            "failed: " + r.error};
  const SummaryStats& s = r.summary;
  return {format_double(value),
          std::to_string(dofs),
          format_double(s.it_ellip_mean),
          format_double(s.t_ellip_mean_s),
          format_double(s.it_ellip_mean_excl_first),
          format_double(s.t_ellip_mean_excl_first_s),
          format_double(s.it_parab_mean),
          format_double(s.t_parab_mean_s),
          format_double(s.t_memb_mean_s),
          "ok"};
}

}  // namespace

SweepResult run_threshold_sweep(const Config& cfg, CoarseningKind branch,
                                const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("threshold sweep: no values given");
  for (double v : values) {
    if (branch == CoarseningKind::MisAggregation && v < 0.0)
      throw ConfigError("threshold sweep: MIS threshold must be >= 0");
    if (branch == CoarseningKind::StrongThreshold && !(v > 0.0 && v < 1.0))
      throw ConfigError("threshold sweep: strong threshold must lie in (0,1)");
  }

  const Experiment exp = build_experiment(cfg);
  const long dofs = static_cast<long>(exp.systems.n_dofs());
  const std::string dir = cfg.get_string("output.dir");
  if (!dir.empty()) std::filesystem::create_directories(dir);

  SweepResult result;
  result.table.header = {"threshold",           "dofs",
                         "it_ellip_mean",       "t_ellip_mean_s",
                         "it_ellip_mean_excl1", "t_ellip_mean_excl1_s",
                         "it_parab_mean",       "t_parab_mean_s",
                         "t_memb_mean_s",       "status"};

  for (const double value : values) {
    SweepValueResult r;
    r.value = value;
    Config cfg_value = cfg;
    cfg_value.set("elliptic.preconditioner", "amg");
    cfg_value.set("amg.branch", branch_name(branch));
    cfg_value.set(branch == CoarseningKind::MisAggregation ? "amg.threshold"
                                                           : "amg.strong_threshold",
                  format_double(value));
    if (!dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof name, "trace_%s_%g.csv", branch_name(branch).c_str(), value);
      r.trace_path = (std::filesystem::path(dir) / name).string();
    }
    try {
      // fresh preconditioner per value; mesh and matrices are shared
      const auto eprec = make_elliptic_preconditioner(cfg_value, exp.systems);
      r.summary = run_window(exp, *eprec, cfg_value, r.trace_path);
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
    result.table.rows.push_back(sweep_row(value, dofs, r));
    result.values.push_back(std::move(r));
  }

  if (!dir.empty()) {
    const std::string stem = "sweep_" + branch_name(branch);
    result.csv_path = (std::filesystem::path(dir) / (stem + ".csv")).string();
    result.text_path = (std::filesystem::path(dir) / (stem + ".txt")).string();
    result.table.write_csv(result.csv_path);
    std::ofstream text(result.text_path);
    text << result.table.to_aligned_text();
  }
  return result;
}

RefinementResult run_refinement_study(const Config& cfg, const std::vector<int>& sizes,
                                      const std::vector<std::string>& solvers) {
  if (sizes.empty()) throw ConfigError("refinement study: no sizes given");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw ConfigError("refinement study: sizes must ascend");
  if (solvers.empty()) throw ConfigError("refinement study: no solver configs given");

  RefinementResult result;
  result.table.header = {"solver",         "n",     "dofs",          "it_ellip_mean",
                         "t_ellip_mean_s", "it_parab_mean", "growth_vs_prev", "bounded",
                         "status"};

  const std::string dir = cfg.get_string("output.dir");
  if (!dir.empty()) std::filesystem::create_directories(dir);

  for (const std::string& solver : solvers) {
    Config solver_cfg = cfg;
    if (solver == "amg-mis") {
      solver_cfg.set("elliptic.preconditioner", "amg");
      solver_cfg.set("amg.branch", "mis");
    } else if (solver == "amg-strong") {
      solver_cfg.set("elliptic.preconditioner", "amg");
      solver_cfg.set("amg.branch", "strong");
    } else if (solver == "identity") {
      solver_cfg.set("elliptic.preconditioner", "identity");
    } else {
      throw ConfigError("refinement study: unknown solver '" + solver +
                        "' (use amg-mis, amg-strong or identity)");
    }

    double prev_iters = -1.0;
    for (const int n : sizes) {
      Config size_cfg = solver_cfg;
      size_cfg.set("mesh.n1", std::to_string(n));
      size_cfg.set("mesh.n2", std::to_string(n));
      size_cfg.set("mesh.n3", std::to_string(n));

      RefinementRow row;
      row.solver = solver;
      row.n = n;
      try {
        const Experiment exp = build_experiment(size_cfg);
        row.dofs = static_cast<long>(exp.systems.n_dofs());
        const auto eprec = make_elliptic_preconditioner(size_cfg, exp.systems);
        row.summary = run_window(exp, *eprec, size_cfg, "");
        if (prev_iters > 0.0) {
          row.growth_vs_prev = row.summary.it_ellip_mean / prev_iters;
          row.bounded = row.growth_vs_prev <= 2.0;
        }
        prev_iters = row.summary.it_ellip_mean;
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        prev_iters = -1.0;
      }

      if (row.failed) {
        result.table.rows.push_back({row.solver, std::to_string(n), "", "", "", "", "", "",
                                     "failed: " + row.error});
      } else {
        result.table.rows.push_back(
            {row.solver, std::to_string(n), std::to_string(row.dofs),
             format_double(row.summary.it_ellip_mean), format_double(row.summary.t_ellip_mean_s),
             format_double(row.summary.it_parab_mean),
             row.growth_vs_prev > 0.0 ? format_double(row.growth_vs_prev) : std::string("-"),
             row.growth_vs_prev > 0.0 ? (row.bounded ? "yes" : "NO") : std::string("-"), "ok"});
      }
      result.rows.push_back(std::move(row));
    }
  }

  if (!dir.empty()) {
    result.csv_path = (std::filesystem::path(dir) / "refinement.csv").string();
    result.text_path = (std::filesystem::path(dir) / "refinement.txt").string();
    result.table.write_csv(result.csv_path);
    std::ofstream text(result.text_path);
    text << result.table.to_aligned_text();
  }
  return result;
}

SimulateResult run_simulate(const Config& cfg) {
  const Experiment exp = build_experiment(cfg);
  const auto eprec = make_elliptic_preconditioner(cfg, exp.systems);
  const CsrMatrix pop = parabolic_matrix(exp.systems, exp.options.c_m, exp.options.dt_ms);
  const auto pprec = make_parabolic_preconditioner(cfg, pop);
  const StepperContext ctx =
      make_stepper_context(exp.systems, *exp.model, *eprec, *pprec, exp.stimulus, exp.options);

  SimulateResult result;
  result.simulation = run_simulation(ctx, output_from(cfg));
  const SummaryStats& s = result.simulation.summary;

  nlohmann::json j;
  j["mesh"] = {{"kind", cfg.get_string("mesh.kind")},
               {"cells", {exp.systems.mesh.info.cells[0], exp.systems.mesh.info.cells[1],
                          exp.systems.mesh.info.cells[2]}},
               {"nodes", exp.systems.n_nodes()},
               {"dofs", exp.systems.n_dofs()}};
  j["run"] = {{"dt_ms", exp.options.dt_ms},
              {"t_end_ms", cfg.get_double("time.t_end_ms")},
              {"steps", s.steps}};
  j["solvers"] = {{"elliptic", cfg.get_string("elliptic.preconditioner")},
                  {"parabolic", cfg.get_string("parabolic.preconditioner")},
                  {"rtol", cfg.get_double("solver.rtol")}};
  if (cfg.get_string("elliptic.preconditioner") == "amg") {
    const auto* amg = dynamic_cast<const AmgPreconditioner*>(eprec.get());
    const AmgHierarchy& h = amg->hierarchy();
    std::vector<long> sizes, nnz;
    for (const AmgLevel& lvl : h.levels) {
      sizes.push_back(lvl.a.n_rows);
      nnz.push_back(static_cast<long>(lvl.a.nnz()));
    }
    j["amg"] = {{"branch", cfg.get_string("amg.branch")},
                {"threshold", cfg.get_double("amg.threshold")},
                {"strong_threshold", cfg.get_double("amg.strong_threshold")},
                {"levels", h.n_levels()},
                {"level_sizes", sizes},
                {"level_nnz", nnz},
                {"operator_complexity", h.operator_complexity()},
                {"stagnated", h.stagnated}};
  }
  j["means"] = {{"it_ellip", s.it_ellip_mean},
                {"t_ellip_s", s.t_ellip_mean_s},
                {"it_parab", s.it_parab_mean},
                {"t_parab_s", s.t_parab_mean_s},
                {"t_memb_s", s.t_memb_mean_s}};
  j["means_excluding_first_step"] = {{"it_ellip", s.it_ellip_mean_excl_first},
                                     {"t_ellip_s", s.t_ellip_mean_excl_first_s},
                                     {"it_parab", s.it_parab_mean_excl_first},
                                     {"t_parab_s", s.t_parab_mean_excl_first_s},
                                     {"t_memb_s", s.t_memb_mean_excl_first_s}};

  const std::string dir = cfg.get_string("output.dir");
  if (!dir.empty()) {
    result.summary_json_path = (std::filesystem::path(dir) / "summary.json").string();
    std::ofstream out(result.summary_json_path);
    out << j.dump(2) << "\n";
  }

  std::ostringstream text;
  text << "steps: " << s.steps << ", dofs: " << exp.systems.n_dofs() << "\n";
  text << "It_ellip_mean: " << format_double(s.it_ellip_mean)
       << "  (excl. step 1: " << format_double(s.it_ellip_mean_excl_first) << ")\n";
  text << "T_ellip_mean:  " << format_double(s.t_ellip_mean_s) << " s\n";
  text << "It_parab_mean: " << format_double(s.it_parab_mean) << "\n";
  text << "T_parab_mean:  " << format_double(s.t_parab_mean_s) << " s\n";
  text << "T_memb_mean:   " << format_double(s.t_memb_mean_s) << " s\n";
  result.summary_text = text.str();
  return result;
}

}  // namespace cardio
