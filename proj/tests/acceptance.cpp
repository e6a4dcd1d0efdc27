// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs the published-scale checks at desk size.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cardio/amg.hpp"
#include "cardio/config.hpp"
#include "cardio/harness.hpp"
#include "cardio/stepper.hpp"
#include "cardio/vec.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cardio;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

oracle::Dense to_dense(const CsrMatrix& a) {
  oracle::Dense d(a.n_rows, a.n_cols);
  for (index_t i = 0; i < a.n_rows; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) d(i, a.col_idx[k]) = a.vals[k];
  return d;
}

std::filesystem::path work_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "cardio_acceptance";
  std::filesystem::create_directories(dir);
  return dir;
}

// --- criteria ---------------------------------------------------------------

void null_space_compatibility(Checker& c) {
  const BidomainSystems sys =
      assemble_bidomain(generate_ellipsoid_mesh({}, 32, 32, 16), ConductivitySet{});
  const std::vector<double> ones(sys.n_nodes(), 1.0);
  const auto r = spmv(sys.a_sum, ones);
  const double bound = 1e-10 * max_abs(sys.a_sum);
  c.require(norm_inf(r) <= bound, "||(A_i+A_e) 1||_inf = " + fmt(norm_inf(r)) +
                                      " exceeds 1e-10 * max|A| = " + fmt(bound));
  c.note("||(A_i+A_e)1||_inf = " + fmt(norm_inf(r)));

  const double a_max = max_abs(sys.a_intra);
  DeterministicSequence seq(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v = seq.vector(sys.n_nodes());
    if (trial == 0)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = sys.mesh.nodes[i].x;  // structured field
    auto b = spmv(sys.a_intra, v);
    for (double& x : b) x = -x;
    const double scale = a_max * (norm_inf(v) + 1.0);
    c.require(std::abs(mean(b)) <= 1e-10 * scale,
              "mean(-A_i v) = " + fmt(mean(b)) + " not within 1e-10 scaled");
  }
}

void assembly_oracle(Checker& c) {
  // single-element stiffness against analytic trilinear integration
  const HexMesh cube = generate_box_mesh({1, 1, 1}, {1, 1, 1});
  const CsrMatrix ke = assemble_stiffness(cube, {1.0, 1.0, 1.0});
  const int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                            {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  double worst = 0.0;
  for (int p = 0; p < 8; ++p)
    for (int q = 0; q < 8; ++q) {
      int diff = 0;
      for (int d = 0; d < 3; ++d) diff += corner[p][d] != corner[q][d];
      const double expected = diff == 0 ? 1.0 / 3.0 : (diff == 1 ? 0.0 : -1.0 / 12.0);
      worst = std::max(worst,
                       std::abs(ke.at(cube.elements[0][p], cube.elements[0][q]) - expected));
    }
  c.require(worst <= 1e-12, "element stiffness deviates " + fmt(worst) + " from analytic values");
  c.note("max element-matrix deviation " + fmt(worst));

  const HexMesh box = generate_box_mesh({1.5, 0.8, 1.1}, {6, 5, 4});
  const double box_exact = 1.5 * 0.8 * 1.1;
  const double box_mass = assemble_lumped_mass(box).total();
  c.require(std::abs(box_mass - box_exact) <= 1e-10 * box_exact,
            "box lumped mass " + fmt(box_mass) + " != volume " + fmt(box_exact));

  const HexMesh lv = generate_ellipsoid_mesh({}, 16, 16, 8);
  const double lv_volume = lv.volume();
  const double lv_mass = assemble_lumped_mass(lv).total();
  c.require(std::abs(lv_mass - lv_volume) <= 1e-10 * lv_volume,
            "ellipsoid lumped mass " + fmt(lv_mass) + " != quadrature volume " + fmt(lv_volume));
}

void amg_correctness(Checker& c) {
  // galerkin products, dense verified (n <= 200)
  for (const CoarseningKind kind :
       {CoarseningKind::MisAggregation, CoarseningKind::StrongThreshold}) {
    const CsrMatrix a = fixtures::fd_laplacian_2d(13);  // 169 unknowns
    AmgConfig cfg;
    cfg.coarsening = kind;
    cfg.threshold = 0.0;
    cfg.strong_alpha = 0.25;
    cfg.coarse_eq_limit = 10;
    const AmgHierarchy h = amg_setup(a, cfg);
    c.require(h.n_levels() >= 2, "hierarchy did not coarsen");
    for (int k = 0; k + 1 < h.n_levels(); ++k) {
      const oracle::Dense ak = to_dense(h.levels[k].a);
      const oracle::Dense p = to_dense(h.levels[k].p);
      const oracle::Dense ref = oracle::matmul(oracle::transpose(p), oracle::matmul(ak, p));
      const oracle::Dense got = to_dense(h.levels[k + 1].a);
      double max_ref = 0.0, gap = 0.0;
      for (double v : ref.a) max_ref = std::max(max_ref, std::abs(v));
      for (std::size_t i = 0; i < ref.a.size(); ++i)
        gap = std::max(gap, std::abs(got.a[i] - ref.a[i]));
      c.require(gap <= 1e-12 * max_ref, "galerkin product deviates " + fmt(gap) + " (level " +
                                            std::to_string(k) + ")");
    }
  }

  // tentative prolongator unit column norms
  {
    std::mt19937 rng(3);
    const index_t n = 150, nc = 31;
    std::vector<index_t> labels(n);
    for (index_t i = 0; i < nc; ++i) labels[i] = i;
    for (index_t i = nc; i < n; ++i) labels[i] = static_cast<index_t>(rng() % nc);
    const CsrMatrix p = build_tentative_prolongator(labels, nc);
    const CsrMatrix pt = transpose(p);
    double worst = 0.0;
    for (index_t col = 0; col < nc; ++col) {
      double s = 0.0;
      for (std::int64_t k = pt.row_ptr[col]; k < pt.row_ptr[col + 1]; ++k)
        s += pt.vals[k] * pt.vals[k];
      worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
    }
    c.require(worst <= 1e-15, "tentative prolongator column norm deviates " + fmt(worst));
    c.note("max column-norm deviation " + fmt(worst));
  }

  // mis seeds: brute-force maximal independence, 100 random graphs n <= 12
  {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 12);
      oracle::Dense d(n, n);
      for (int i = 0; i < n; ++i) d(i, i) = 1.0 + u(rng);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (u(rng) < 0.4) {
            const double v = -(0.1 + u(rng));
            d(i, j) = v;
            d(j, i) = v;
          }
      TripletBuilder tb(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (d(i, j) != 0.0) tb.add(i, j, d(i, j));
      const FilteredGraph g = filter_graph(tb.build(), 0.0);
      const Aggregation agg = mis_aggregate(g);
      std::vector<char> seed(n, 0);
      for (index_t s : agg.seeds) seed[s] = 1;
      for (index_t i = 0; i < static_cast<index_t>(n); ++i) {
        bool touches_seed = false;
        for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k) {
          if (seed[i] && seed[g.neighbors[k]]) ++violations;  // not independent
          touches_seed = touches_seed || seed[g.neighbors[k]];
        }
        if (!seed[i] && !touches_seed) ++violations;  // not maximal
      }
    }
    c.require(violations == 0,
              std::to_string(violations) + " independence/maximality violations");
  }
}

void amg_effectiveness(Checker& c) {
  // V-cycle contraction on the 16^3 box Poisson operator
  {
    const CsrMatrix a = fixtures::fd_laplacian_3d(16);
    AmgConfig cfg;
    cfg.threshold = 0.0;
    const AmgHierarchy h = amg_setup(a, cfg);
    DeterministicSequence seq(99);
    const std::vector<double> b = seq.vector(a.n_rows);
    std::vector<double> x(a.n_rows, 0.0), r(a.n_rows);
    spmv(a, x, r);
    for (index_t i = 0; i < a.n_rows; ++i) r[i] = b[i] - r[i];
    double prev = norm2(r), worst = 0.0;
    for (int cycle = 0; cycle < 10; ++cycle) {
      v_cycle(h, b, x);
      spmv(a, x, r);
      for (index_t i = 0; i < a.n_rows; ++i) r[i] = b[i] - r[i];
      const double now = norm2(r);
      worst = std::max(worst, now / prev);
      prev = now;
    }
    c.require(worst <= 0.5, "V-cycle contraction " + fmt(worst) + " exceeds 0.5");
    c.note("worst per-cycle contraction " + fmt(worst));
  }

  // PCG+AMG iterations on the ellipsoid elliptic system across refinements
  {
    std::vector<int> iters;
    for (const int n : {8, 16, 32}) {
      const BidomainSystems sys =
          assemble_bidomain(generate_ellipsoid_mesh({}, n, n, n), ConductivitySet{});
      auto h = std::make_shared<AmgHierarchy>(amg_setup(sys.a_sum, AmgConfig{}));
      const AmgPreconditioner prec(h);
      DeterministicSequence seq(77);
      const std::vector<double> v = seq.vector(sys.n_nodes());
      std::vector<double> u_e(sys.n_nodes(), 0.0);
      const SolveStats st = elliptic_solve(sys, v, u_e, prec, 1e-5, 10000);
      iters.push_back(st.iterations);
    }
    std::ostringstream note;
    note << "iterations 8/16/32: " << iters[0] << "/" << iters[1] << "/" << iters[2];
    c.note(note.str());
    c.require(iters[1] <= 60, "PCG+AMG needed " + std::to_string(iters[1]) +
                                  " iterations at 16^3 (limit 60)");
    c.require(iters[1] <= 2 * iters[0],
              "iteration growth 8^3 -> 16^3 exceeds 2x");
    c.require(iters[2] <= 2 * iters[1],
              "iteration growth 16^3 -> 32^3 exceeds 2x");
  }
}

void threshold_ordering(Checker& c) {
  Config cfg;  // defaults: 32x32x16 ellipsoid, 5 ms window, dt 0.05
  cfg.set("output.dir", (work_dir() / "sweep_mis").string());
  const SweepResult res = run_threshold_sweep(cfg, CoarseningKind::MisAggregation, {0.0, 0.06});
  for (const auto& v : res.values)
    c.require(!v.failed, "sweep value " + fmt(v.value) + " failed: " + v.error);
  if (!c.ok) return;
  const double it0 = res.values[0].summary.it_ellip_mean;
  const double it6 = res.values[1].summary.it_ellip_mean;
  c.note("mean elliptic iterations: " + fmt(it0) + " (thr 0.0) vs " + fmt(it6) + " (thr 0.06)");
  c.require(it6 < it0, "iterations at threshold 0.06 are not strictly below threshold 0.0");
}

void strong_threshold_sanity(Checker& c) {
  Config cfg;
  cfg.set("output.dir", (work_dir() / "sweep_strong").string());
  const SweepResult res = run_threshold_sweep(cfg, CoarseningKind::StrongThreshold,
                                              {0.25, 0.3, 0.4, 0.5, 0.6, 0.7});
  double lo = 1e300, hi = -1e300;
  for (const auto& v : res.values) {
    c.require(!v.failed, "value " + fmt(v.value) + " failed: " + v.error);
    if (v.failed) continue;
    c.require(std::isfinite(v.summary.it_ellip_mean),
              "value " + fmt(v.value) + " produced non-finite iterations");
    lo = std::min(lo, v.summary.it_ellip_mean);
    hi = std::max(hi, v.summary.it_ellip_mean);
  }
  c.require(res.values.size() == 6, "expected six sweep rows");
  c.require(hi - lo > 1e-9, "iteration profile is constant across thresholds");
  c.note("mean elliptic iterations span [" + fmt(lo) + ", " + fmt(hi) + "]");
}

void physiology_smoke(Checker& c) {
  const Config cfg;  // defaults: ellipsoid 32x32x16, 5 ms, apex stimulus
  const Experiment exp = build_experiment(cfg);
  const auto eprec = make_elliptic_preconditioner(cfg, exp.systems);
  const CsrMatrix pop = parabolic_matrix(exp.systems, exp.options.c_m, exp.options.dt_ms);
  const auto pprec = make_parabolic_preconditioner(cfg, pop);
  const StepperContext ctx =
      make_stepper_context(exp.systems, *exp.model, *eprec, *pprec, exp.stimulus, exp.options);

  const double v_th = cfg.get_double("ionic.v_th");
  const double lo_bound = -0.05, hi_bound = 1.05;  // [-90, +20] mV

  SimState state = make_resting_sim_state(exp.systems, *exp.model);
  double t_threshold = -1.0, v_lo = 1e300, v_hi = -1e300, worst_mean_ue = 0.0;
  const int steps = 100;
  for (int s = 0; s < steps; ++s) {
    time_step(ctx, state);
    const double mu = std::abs(mean(state.u_e));
    worst_mean_ue = std::max(worst_mean_ue, mu / (norm_inf(state.u_e) + 1.0));
    for (std::size_t i = 0; i < state.v.size(); ++i) {
      v_lo = std::min(v_lo, state.v[i]);
      v_hi = std::max(v_hi, state.v[i]);
    }
    if (t_threshold < 0.0) {
      for (std::size_t i = 0; i < state.v.size(); ++i)
        if (exp.stimulus.region(exp.systems.mesh.nodes[i]) && state.v[i] > v_th) {
          t_threshold = state.t_ms;
          break;
        }
    }
  }
  c.require(t_threshold >= 0.0 && t_threshold <= 2.0,
            "stimulated region crossed threshold at t = " + fmt(t_threshold) + " ms (limit 2)");
  bool outside_active = false;
  for (std::size_t i = 0; i < state.v.size(); ++i)
    if (!exp.stimulus.region(exp.systems.mesh.nodes[i]) && state.v[i] > v_th)
      outside_active = true;
  c.require(outside_active, "the excitation front never left the stimulus region");
  c.require(v_lo >= lo_bound && v_hi <= hi_bound,
            "v left the documented bounds: [" + fmt(-85 + 100 * v_lo) + ", " +
                fmt(-85 + 100 * v_hi) + "] mV");
  c.require(worst_mean_ue <= 1e-10, "mean(u_e) drifted to " + fmt(worst_mean_ue));
  c.note("threshold at " + fmt(t_threshold) + " ms, v in [" + fmt(-85 + 100 * v_lo) + ", " +
         fmt(-85 + 100 * v_hi) + "] mV");
}

void determinism(Checker& c) {
  Config cfg;
  cfg.set("mesh.kind", "box");
  cfg.set("mesh.n1", "8");
  cfg.set("mesh.n2", "8");
  cfg.set("mesh.n3", "8");
  cfg.set("time.t_end_ms", "1.0");
  cfg.set("stimulus.radius_cm", "0.3");
  cfg.set("output.timings", "none");

  const auto read_file = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };

  cfg.set("output.dir", (work_dir() / "det_a").string());
  const SimulateResult r1 = run_simulate(cfg);
  cfg.set("output.dir", (work_dir() / "det_b").string());
  const SimulateResult r2 = run_simulate(cfg);
  const std::string t1 = read_file(r1.simulation.trace_path);
  const std::string t2 = read_file(r2.simulation.trace_path);
  c.require(!t1.empty() && t1 == t2, "trace CSVs differ between identical runs");
  c.note(std::to_string(t1.size()) + " trace bytes identical");

  // with wall-clock timings on, the iteration data still matches row for row
  cfg.set("output.timings", "wall");
  cfg.set("output.dir", (work_dir() / "det_c").string());
  const SimulateResult r3 = run_simulate(cfg);
  c.require(r3.simulation.trace.size() == r1.simulation.trace.size(), "trace lengths differ");
  for (std::size_t i = 0; i < r3.simulation.trace.size(); ++i) {
    c.require(r3.simulation.trace[i].elliptic.iterations ==
                      r1.simulation.trace[i].elliptic.iterations &&
                  r3.simulation.trace[i].parabolic.iterations ==
                      r1.simulation.trace[i].parabolic.iterations,
              "iteration counts differ at step " + std::to_string(i + 1));
    if (!c.ok) break;
  }
}

void dof_accounting(Checker& c) {
  const HexMesh small = generate_ellipsoid_mesh({}, 32, 32, 16);
  c.require(2 * small.n_nodes() == 37026,
            "32x32x16 mesh has " + std::to_string(2 * small.n_nodes()) + " dofs, expected 37026");
  const HexMesh large = generate_ellipsoid_mesh({}, 128, 128, 64);
  c.require(2 * large.n_nodes() == 2163330, "128x128x64 mesh has " +
                                                std::to_string(2 * large.n_nodes()) +
                                                " dofs, expected 2163330");
  c.note("dofs: " + std::to_string(2 * small.n_nodes()) + " and " +
         std::to_string(2 * large.n_nodes()));
}

struct Criterion {
  const char* name;
  std::function<void(Checker&)> run;
  double time_limit_s;  // 0 = no limit stated
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"null_space_and_compatibility", null_space_compatibility, 10.0},
      {"assembly_oracle", assembly_oracle, 0.0},
      {"amg_correctness", amg_correctness, 0.0},
      {"amg_effectiveness", amg_effectiveness, 120.0},
      {"threshold_calibration_ordering", threshold_ordering, 300.0},
      {"strong_threshold_sanity", strong_threshold_sanity, 0.0},
      {"physiology_smoke_test", physiology_smoke, 0.0},
      {"determinism", determinism, 0.0},
      {"dof_accounting", dof_accounting, 0.0},
  };

  int failures = 0;
  for (const Criterion& crit : criteria) {
    Checker checker;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      crit.run(checker);
    } catch (const std::exception& e) {
      checker.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (crit.time_limit_s > 0.0 && elapsed > crit.time_limit_s)
      checker.require(false, "runtime " + fmt(elapsed) + " s exceeds the " +
                                 fmt(crit.time_limit_s) + " s limit");
    if (!checker.ok) ++failures;
    std::printf("[%s] %-32s (%6.2f s)%s%s\n", checker.ok ? "PASS" : "FAIL", crit.name, elapsed,
                checker.detail.empty() ? "" : "  ", checker.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  std::filesystem::remove_all(work_dir());
  return failures == 0 ? 0 : 1;
}
