#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cardio/amg.hpp"
#include "cardio/config.hpp"
#include "cardio/report.hpp"
#include "cardio/stepper.hpp"

namespace cardio {

/// Everything one experiment needs, built from a Config: mesh, assembled
/// operators, membrane model, stimulus and stepper options.
struct Experiment {
  BidomainSystems systems;
  std::unique_ptr<IonicModel> model;
  Stimulus stimulus;
  StepperOptions options;
};

HexMesh build_mesh(const Config& cfg);
Experiment build_experiment(const Config& cfg);

AmgConfig amg_config_from(const Config& cfg);

/// elliptic.preconditioner = amg builds a hierarchy on A_i + A_e; identity is
/// the unpreconditioned control.
std::unique_ptr<Preconditioner> make_elliptic_preconditioner(const Config& cfg,
                                                             const BidomainSystems& sys);
std::unique_ptr<Preconditioner> make_parabolic_preconditioner(const Config& cfg,
                                                              const CsrMatrix& parabolic_op);

struct SweepValueResult {
  double value = 0.0;
  bool failed = false;
  std::string error;
  SummaryStats summary;
  std::string trace_path;
};

struct SweepResult {
  ReportTable table;
  std::vector<SweepValueResult> values;
  std::string csv_path;   // empty when no artifacts were written
  std::string text_path;
};

/// AMG threshold calibration: one simulation window per threshold value with
/// a freshly built elliptic preconditioner, shared assembly. Per-value solver
/// failures are recorded in the row and the sweep continues.
SweepResult run_threshold_sweep(const Config& cfg, CoarseningKind branch,
                                const std::vector<double>& values);

struct RefinementRow {
  std::string solver;
  int n = 0;
  long dofs = 0;
  bool failed = false;
  std::string error;
  SummaryStats summary;
  double growth_vs_prev = 0.0;  // 0 for the first size
  bool bounded = true;          // growth <= 2x vs previous size
};

struct RefinementResult {
  ReportTable table;
  std::vector<RefinementRow> rows;
  std::string csv_path;
  std::string text_path;
};

/// Fixed-window runs over ascending mesh sizes; flags any solver whose mean
/// elliptic iterations grow by more than 2x between consecutive refinements.
/// Recognized solver names: amg-mis, amg-strong, identity.
RefinementResult run_refinement_study(const Config& cfg, const std::vector<int>& sizes,
                                      const std::vector<std::string>& solvers);

struct SimulateResult {
  SimulationResult simulation;
  std::string summary_json_path;
  std::string summary_text;
};

/// Full simulation with trace, optional snapshots and a JSON/text summary of
/// the per-step means.
SimulateResult run_simulate(const Config& cfg);

std::vector<double> parse_double_list(const std::string& csv);
std::vector<int> parse_int_list(const std::string& csv);

}  // namespace cardio
