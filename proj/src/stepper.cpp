#include "cardio/stepper.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "cardio/report.hpp"
#include "cardio/vec.hpp"
#include "cardio/vtk.hpp"

namespace cardio {

BidomainSystems assemble_bidomain(HexMesh mesh, const ConductivitySet& sigma) {
  sigma.validate();
  mesh.validate();
  BidomainSystems sys;
  sys.mass = assemble_lumped_mass(mesh);
  sys.a_intra = assemble_stiffness(mesh, sigma.intra());
  sys.a_extra = assemble_stiffness(mesh, sigma.extra());
  sys.a_sum = add(sys.a_intra, sys.a_extra);
  sys.mesh = std::move(mesh);
  return sys;
}

CsrMatrix parabolic_matrix(const BidomainSystems& sys, double c_m, double dt) {
  if (!(dt > 0.0) || !(c_m > 0.0))
    throw std::invalid_argument("parabolic matrix: need dt > 0 and c_m > 0");
  CsrMatrix m = CsrMatrix::zero(sys.a_intra.n_rows, sys.a_intra.n_cols);
  // diagonal CSR of (c_m/dt) * M
  m.row_ptr.resize(sys.a_intra.n_rows + 1);
  m.col_idx.resize(sys.a_intra.n_rows);
  m.vals.resize(sys.a_intra.n_rows);
  for (index_t i = 0; i < m.n_rows; ++i) {
    m.row_ptr[i] = i;
    m.col_idx[i] = i;
    m.vals[i] = c_m / dt * sys.mass.diag[i];
  }
  m.row_ptr[m.n_rows] = m.n_rows;
  return add(m, sys.a_intra);
}

SimState make_resting_sim_state(const BidomainSystems& sys, const IonicModel& model) {
  SimState st;
  st.v.assign(sys.n_nodes(), model.resting_v());
  st.u_e.assign(sys.n_nodes(), 0.0);
  st.ionic = make_resting_state(model, sys.n_nodes());
  st.t_ms = 0.0;
  return st;
}

SolveStats elliptic_solve(const BidomainSystems& sys, std::span<const double> v,
                          std::vector<double>& u_e, const Preconditioner& prec, double rtol,
                          int maxit) {
  std::vector<double> b(sys.n_nodes());
  spmv(sys.a_intra, v, b);
  for (double& x : b) x = -x;

  // -A_i * (constant v) vanishes analytically; do not iterate on its
  // rounding residue
  if (norm_inf(b) <= 1e-12 * max_abs(sys.a_intra) * (norm_inf(v) + 1.0)) {
    std::fill(u_e.begin(), u_e.end(), 0.0);
    SolveStats stats;
    stats.converged = true;
    stats.residual_history = {0.0};
    return stats;
  }

  const SolveStats stats =
      pcg(sys.a_sum, b, u_e, prec, {.rtol = rtol, .maxit = maxit, .deflate_constants = true});
  if (!stats.converged)
    throw SolverFailure("elliptic solve did not converge within " + std::to_string(maxit) +
                        " iterations (relative residual " +
                        std::to_string(stats.final_relative_residual) + ")");
  return stats;
}

SolveStats parabolic_solve(const BidomainSystems& sys, const CsrMatrix& parabolic_op,
                           std::vector<double>& v, std::span<const double> u_e,
                           std::span<const double> i_ion, std::span<const double> i_app, double dt,
                           double c_m, const Preconditioner& prec, double rtol, int maxit) {
  const std::size_t n = sys.n_nodes();
  std::vector<double> b(n);
  spmv(sys.a_intra, u_e, b);  // b holds A_i u_e
  for (std::size_t i = 0; i < n; ++i) {
    const double m_i = sys.mass.diag[i];
    b[i] = c_m / dt * m_i * v[i] - b[i] - m_i * i_ion[i] + m_i * i_app[i];
  }

  const SolveStats stats = pcg(parabolic_op, b, v, prec, {.rtol = rtol, .maxit = maxit});
  if (!stats.converged)
    throw SolverFailure("parabolic solve did not converge within " + std::to_string(maxit) +
                        " iterations (relative residual " +
                        std::to_string(stats.final_relative_residual) + ")");
  return stats;
}

StepperContext make_stepper_context(const BidomainSystems& sys, const IonicModel& model,
                                    const Preconditioner& elliptic_prec,
                                    const Preconditioner& parabolic_prec, const Stimulus& stimulus,
                                    const StepperOptions& options) {
  if (!(options.dt_ms > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
  StepperContext ctx;
  ctx.sys = &sys;
  ctx.model = &model;
  ctx.elliptic_prec = &elliptic_prec;
  ctx.parabolic_prec = &parabolic_prec;
  ctx.stimulus = stimulus;
  ctx.options = options;
  ctx.parabolic_op = parabolic_matrix(sys, options.c_m, options.dt_ms);
  return ctx;
}

StepReport time_step(const StepperContext& ctx, SimState& state) {
  const BidomainSystems& sys = *ctx.sys;
  const StepperOptions& opt = ctx.options;
  StepReport report;

  // membrane update at frozen v^n (backward Euler in w, c); the model's
  // kinetics are capacitance-normalized rates, so both current vectors carry
  // the c_m factor into the parabolic right side
  const auto t0 = std::chrono::steady_clock::now();
  ionic_step(*ctx.model, state.v, opt.dt_ms, state.ionic);
  std::vector<double> i_ion = eval_ion_current(*ctx.model, state.v, state.ionic);
  for (double& x : i_ion) x *= opt.c_m;
  std::vector<double> i_app = eval_stimulus(ctx.stimulus, state.t_ms, sys.mesh);
  for (double& x : i_app) x *= opt.current_scale * opt.c_m;
  report.ionic_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // elliptic solve at v^n, then parabolic update to v^{n+1}
  report.elliptic =
      elliptic_solve(sys, state.v, state.u_e, *ctx.elliptic_prec, opt.rtol, opt.maxit);
  report.parabolic = parabolic_solve(sys, ctx.parabolic_op, state.v, state.u_e, i_ion, i_app,
                                     opt.dt_ms, opt.c_m, *ctx.parabolic_prec, opt.rtol, opt.maxit);

  for (double x : state.v)
    if (!std::isfinite(x))
      throw SolverFailure("transmembrane potential became non-finite at t = " +
                          std::to_string(state.t_ms) + " ms (unstable timestep?)");

  state.t_ms += opt.dt_ms;
  report.t_ms = state.t_ms;
  return report;
}

SummaryStats summarize_trace(const std::vector<StepReport>& trace) {
  SummaryStats s;
  s.steps = static_cast<int>(trace.size());
  if (trace.empty()) return s;
  const auto accumulate = [&](std::size_t begin, double& it_e, double& it_p, double& t_e,
                              double& t_p, double& t_m) {
    const double n = static_cast<double>(trace.size() - begin);
    if (n <= 0) return;
    for (std::size_t i = begin; i < trace.size(); ++i) {
      it_e += trace[i].elliptic.iterations;
      it_p += trace[i].parabolic.iterations;
      t_e += trace[i].elliptic.wall_time;
      t_p += trace[i].parabolic.wall_time;
      t_m += trace[i].ionic_time_s;
    }
    it_e /= n;
    it_p /= n;
    t_e /= n;
    t_p /= n;
    t_m /= n;
  };
  accumulate(0, s.it_ellip_mean, s.it_parab_mean, s.t_ellip_mean_s, s.t_parab_mean_s,
             s.t_memb_mean_s);
  if (trace.size() > 1)
    accumulate(1, s.it_ellip_mean_excl_first, s.it_parab_mean_excl_first,
               s.t_ellip_mean_excl_first_s, s.t_parab_mean_excl_first_s,
               s.t_memb_mean_excl_first_s);
  return s;
}

void write_trace_csv(const std::string& path, const std::vector<StepReport>& trace,
                     bool write_timings) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "step,t_ms,it_ellip,t_ellip_s,it_parab,t_parab_s,t_memb_s\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const StepReport& r = trace[i];
    out << (i + 1) << "," << format_double(r.t_ms) << "," << r.elliptic.iterations << ","
        << format_double(write_timings ? r.elliptic.wall_time : 0.0) << ","
        << r.parabolic.iterations << ","
        << format_double(write_timings ? r.parabolic.wall_time : 0.0) << ","
        << format_double(write_timings ? r.ionic_time_s : 0.0) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

void write_snapshot(const StepperContext& ctx, const SimState& state, const std::string& dir,
                    int step, std::vector<std::string>& paths) {
  const IonicModel& model = *ctx.model;
  std::vector<double> v_mv(state.v.size()), ue_mv(state.u_e.size());
  const double dv = model.peak_potential_mv() - model.rest_potential_mv();
  for (std::size_t i = 0; i < state.v.size(); ++i) v_mv[i] = model.to_millivolts(state.v[i]);
  for (std::size_t i = 0; i < state.u_e.size(); ++i) ue_mv[i] = dv * state.u_e[i];

  char name[64];
  std::snprintf(name, sizeof name, "snapshot_%06d.vtk", step);
  const std::string path = (std::filesystem::path(dir) / name).string();
  write_vtk_snapshot(ctx.sys->mesh, {{"v_mV", v_mv}, {"ue_mV", ue_mv}}, path);
  paths.push_back(path);
}

}  // namespace

SimulationResult run_simulation(const StepperContext& ctx, const SimulationOutput& out) {
  if (!(out.t_end_ms >= ctx.options.dt_ms))
    throw std::invalid_argument("simulation: t_end must be at least one timestep");

  SimulationResult result;
  result.final_state = make_resting_sim_state(*ctx.sys, *ctx.model);
  SimState& state = result.final_state;

  // whole steps that fit the window; the epsilon absorbs 0.25/0.05-style
  // quotients landing just below an integer
  const int n_steps = static_cast<int>(std::floor(out.t_end_ms / ctx.options.dt_ms + 1e-9));
  const bool artifacts = !out.output_dir.empty();
  if (artifacts) std::filesystem::create_directories(out.output_dir);

  if (artifacts && out.snapshot_every_steps > 0)
    write_snapshot(ctx, state, out.output_dir, 0, result.snapshot_paths);

  try {
    for (int step = 1; step <= n_steps; ++step) {
      result.trace.push_back(time_step(ctx, state));
      if (artifacts && out.snapshot_every_steps > 0 &&
          (step % out.snapshot_every_steps == 0 || step == n_steps))
        write_snapshot(ctx, state, out.output_dir, step, result.snapshot_paths);
    }
  } catch (...) {
    // flush what we have so a failed run still leaves its partial trace
    if (artifacts) {
      const std::string path =
          (std::filesystem::path(out.output_dir) / out.trace_name).string();
      write_trace_csv(path, result.trace, out.write_timings);
    }
    throw;
  }

  result.summary = summarize_trace(result.trace);
  if (artifacts) {
    result.trace_path = (std::filesystem::path(out.output_dir) / out.trace_name).string();
    write_trace_csv(result.trace_path, result.trace, out.write_timings);
  }
  return result;
}

}  // namespace cardio
