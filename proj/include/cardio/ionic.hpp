#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardio/mesh.hpp"

namespace cardio {

struct IonicSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pointwise membrane model: gating variables w (dw/dt = R), ionic
/// concentrations c (dc/dt = C) and the transmembrane current I_ion(v, w, c).
/// The declared resting state must be a fixed point of R and C.
///
/// step_state performs the backward-Euler update at frozen v,
///   w' - dt R(v, w') = w,  c' - dt C(v, w', c') = c,
/// with a generic damped-Newton default; models with linear kinetics
/// override it with the closed form.
class IonicModel {
 public:
  virtual ~IonicModel() = default;

  virtual int n_gating() const = 0;
  virtual int n_concentration() const = 0;
  virtual std::string name() const = 0;

  virtual double resting_v() const = 0;
  virtual std::vector<double> resting_w() const = 0;
  virtual std::vector<double> resting_c() const = 0;

  virtual double ion_current(double v, std::span<const double> w,
                             std::span<const double> c) const = 0;
  virtual void gating_rhs(double v, std::span<const double> w, std::span<double> out) const = 0;
  virtual void concentration_rhs(double v, std::span<const double> w, std::span<const double> c,
                                 std::span<double> out) const = 0;

  virtual void step_state(double v, double dt, std::span<double> w, std::span<double> c) const;

  // affine map between the internal membrane scale and millivolts
  virtual double rest_potential_mv() const { return -85.0; }
  virtual double peak_potential_mv() const { return 15.0; }
  double to_millivolts(double v) const {
    return rest_potential_mv() + (peak_potential_mv() - rest_potential_mv()) * v;
  }
};

/// Two-variable excitable membrane:
///   I_ion = G v (1 - v/v_th)(1 - v/v_p) + eta1 v w
///   dw/dt = eta2 (v / v_p - eta3 w)
/// with v on the internal [0, 1] scale and rates per millisecond.
struct RogersMcCullochParams {
  double g = 1.5;
  double v_th = 0.13;
  double v_p = 1.0;
  double eta1 = 4.4;
  double eta2 = 0.012;
  double eta3 = 1.0;

  void validate() const;
};

class RogersMcCullochModel final : public IonicModel {
 public:
  explicit RogersMcCullochModel(const RogersMcCullochParams& params = {});

  int n_gating() const override { return 1; }
  int n_concentration() const override { return 0; }
  std::string name() const override { return "rogers_mcculloch"; }

  double resting_v() const override { return 0.0; }
  std::vector<double> resting_w() const override { return {0.0}; }
  std::vector<double> resting_c() const override { return {}; }

  double ion_current(double v, std::span<const double> w, std::span<const double> c) const override;
  void gating_rhs(double v, std::span<const double> w, std::span<double> out) const override;
  void concentration_rhs(double v, std::span<const double> w, std::span<const double> c,
                         std::span<double> out) const override;

  // linear in w: exact closed-form backward Euler
  void step_state(double v, double dt, std::span<double> w, std::span<double> c) const override;

  const RogersMcCullochParams& params() const { return params_; }

 private:
  RogersMcCullochParams params_;
};

std::unique_ptr<IonicModel> make_ionic_model(const std::string& name,
                                             const RogersMcCullochParams& params = {});

/// Applied intracellular current: `amplitude` (mA/cm^3) on the nodes inside
/// the region for t in [start, start + duration). The extracellular current
/// is its negative, so the pair always satisfies the compatibility condition.
struct Stimulus {
  std::function<bool(const Vec3&)> region;
  double start_ms = 0.0;
  double duration_ms = 1.0;
  double amplitude = 350.0;

  void validate() const;
};

/// Ball-shaped default region; the anchor is the ellipsoid apex or the center
/// of the box face x = 0 unless overridden.
Stimulus make_ball_stimulus(const Vec3& center, double radius_cm, double start_ms,
                            double duration_ms, double amplitude);

Vec3 default_stimulus_center(const HexMesh& mesh);

/// Nodal I_app^i at time t; returns zeros outside the stimulus window. A
/// region that covers no node is reported through `empty_region_warning`.
std::vector<double> eval_stimulus(const Stimulus& stim, double t_ms, const HexMesh& mesh,
                                  bool* empty_region_warning = nullptr);

// --- vectorized helpers over nodal state -----------------------------------

/// State layout: per-node blocks, w[node * n_w + g], c[node * n_c + s].
struct IonicState {
  std::vector<double> w;
  std::vector<double> c;
};

IonicState make_resting_state(const IonicModel& model, std::size_t n_nodes);

/// Backward-Euler update of all nodal gating/concentration blocks at frozen
/// membrane values v. Failures carry the node index.
void ionic_step(const IonicModel& model, std::span<const double> v, double dt, IonicState& state);

std::vector<double> eval_ion_current(const IonicModel& model, std::span<const double> v,
                                     const IonicState& state);

}  // namespace cardio
