#include "cardio/ionic.hpp"

#include <cmath>

namespace cardio {

namespace {

// Damped Newton on F(y) = y - dt * rhs(v, y) - y_old with a finite-difference
// Jacobian; enough for small pointwise systems.
void newton_backward_euler(const std::function<void(std::span<const double>, std::span<double>)>& rhs,
                           double dt, std::span<double> y) {
  const int n = static_cast<int>(y.size());
  if (n == 0) return;
  std::vector<double> y_old(y.begin(), y.end());
  std::vector<double> f(n), f_pert(n), r(n), jac(n * n), step(n), y_try(n);

  const auto residual = [&](std::span<const double> yy, std::span<double> out) {
    rhs(yy, out);
    for (int i = 0; i < n; ++i) out[i] = yy[i] - dt * out[i] - y_old[i];
  };

  const int max_newton = 50;
  for (int it = 0; it < max_newton; ++it) {
    residual(y, r);
    double rnorm = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) throw IonicSolveError("non-finite residual in implicit ionic update");
      rnorm = std::max(rnorm, std::abs(v));
    }
    double yscale = 1.0;
    for (double v : y_old) yscale = std::max(yscale, std::abs(v));
    if (rnorm <= 1e-13 * yscale) return;

    // finite-difference Jacobian
    for (int j = 0; j < n; ++j) {
      std::vector<double> yp(y.begin(), y.end());
      const double h = 1e-7 * (std::abs(yp[j]) + 1.0);
      yp[j] += h;
      residual(yp, f_pert);
      for (int i = 0; i < n; ++i) jac[i * n + j] = (f_pert[i] - r[i]) / h;
    }
    // solve jac * step = r (gaussian elimination, partial pivoting)
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(jac[perm[i] * n + k]) > std::abs(jac[perm[piv] * n + k])) piv = i;
      std::swap(perm[k], perm[piv]);
      const double d = jac[perm[k] * n + k];
      if (std::abs(d) < 1e-300) throw IonicSolveError("singular jacobian in implicit ionic update");
      for (int i = k + 1; i < n; ++i) {
        const double f2 = jac[perm[i] * n + k] / d;
        for (int j = k; j < n; ++j) jac[perm[i] * n + j] -= f2 * jac[perm[k] * n + j];
        r[perm[i]] -= f2 * r[perm[k]];
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = r[perm[i]];
      for (int j = i + 1; j < n; ++j) s -= jac[perm[i] * n + j] * step[j];
      step[i] = s / jac[perm[i] * n + i];
    }

    // damped line search on the residual norm
    double damp = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 8; ++ls) {
      for (int i = 0; i < n; ++i) y_try[i] = y[i] - damp * step[i];
      residual(y_try, f);
      double fnorm = 0.0;
      for (double v : f) fnorm = std::max(fnorm, std::abs(v));
      if (fnorm < rnorm) {
        std::copy(y_try.begin(), y_try.end(), y.begin());
        accepted = true;
        break;
      }
      damp *= 0.5;
    }
    if (!accepted) throw IonicSolveError("implicit ionic update stalled");
  }
  throw IonicSolveError("implicit ionic update did not converge");
}

}  // namespace

void IonicModel::step_state(double v, double dt, std::span<double> w, std::span<double> c) const {
  if (!(dt > 0.0)) throw std::invalid_argument("ionic step: dt must be positive");
  if (!w.empty()) {
    newton_backward_euler(
        [&](std::span<const double> ww, std::span<double> out) { gating_rhs(v, ww, out); }, dt, w);
  }
  if (!c.empty()) {
    newton_backward_euler(
        [&](std::span<const double> cc, std::span<double> out) {
          concentration_rhs(v, w, cc, out);
        },
        dt, c);
  }
}

void RogersMcCullochParams::validate() const {
  if (!(v_p > v_th && v_th > 0.0))
    throw std::invalid_argument("rogers-mcculloch: need v_p > v_th > 0");
  for (double r : {g, eta1, eta2, eta3})
    if (!(r > 0.0)) throw std::invalid_argument("rogers-mcculloch: rates must be positive");
}

RogersMcCullochModel::RogersMcCullochModel(const RogersMcCullochParams& params) : params_(params) {
  params_.validate();
}

double RogersMcCullochModel::ion_current(double v, std::span<const double> w,
                                         std::span<const double>) const {
  return params_.g * v * (1.0 - v / params_.v_th) * (1.0 - v / params_.v_p) +
         params_.eta1 * v * w[0];
}

void RogersMcCullochModel::gating_rhs(double v, std::span<const double> w,
                                      std::span<double> out) const {
  out[0] = params_.eta2 * (v / params_.v_p - params_.eta3 * w[0]);
}

void RogersMcCullochModel::concentration_rhs(double, std::span<const double>,
                                             std::span<const double>, std::span<double>) const {}

void RogersMcCullochModel::step_state(double v, double dt, std::span<double> w,
                                      std::span<double>) const {
  if (!(dt > 0.0)) throw std::invalid_argument("ionic step: dt must be positive");
  // w' - dt eta2 (v/v_p - eta3 w') = w  =>  closed form
  w[0] = (w[0] + dt * params_.eta2 * v / params_.v_p) / (1.0 + dt * params_.eta2 * params_.eta3);
}

std::unique_ptr<IonicModel> make_ionic_model(const std::string& name,
                                             const RogersMcCullochParams& params) {
  if (name == "rogers_mcculloch") return std::make_unique<RogersMcCullochModel>(params);
  throw std::invalid_argument("unknown ionic model '" + name + "'");
}

void Stimulus::validate() const {
  if (!(duration_ms > 0.0)) throw std::invalid_argument("stimulus: duration must be positive");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("stimulus: amplitude must be finite");
  if (!region) throw std::invalid_argument("stimulus: region predicate not set");
}

Stimulus make_ball_stimulus(const Vec3& center, double radius_cm, double start_ms,
                            double duration_ms, double amplitude) {
  Stimulus s;
  const double r2 = radius_cm * radius_cm;
  s.region = [center, r2](const Vec3& p) {
    const Vec3 d = p - center;
    return d.dot(d) <= r2;
  };
  s.start_ms = start_ms;
  s.duration_ms = duration_ms;
  s.amplitude = amplitude;
  return s;
}

Vec3 default_stimulus_center(const HexMesh& mesh) {
  if (mesh.nodes.empty()) throw std::invalid_argument("stimulus center: empty mesh");
  if (mesh.info.kind == MeshKind::Box) {
    // center of the x = 0 face
    return {0.0, mesh.info.box_lengths[1] / 2.0, mesh.info.box_lengths[2] / 2.0};
  }
  // lowest-z node (ellipsoid apex ring; External meshes get the same rule)
  Vec3 best = mesh.nodes.front();
  for (const Vec3& p : mesh.nodes)
    if (p.z < best.z) best = p;
  return best;
}

std::vector<double> eval_stimulus(const Stimulus& stim, double t_ms, const HexMesh& mesh,
                                  bool* empty_region_warning) {
  stim.validate();
  std::vector<double> out(mesh.n_nodes(), 0.0);
  if (empty_region_warning) *empty_region_warning = false;
  if (t_ms < stim.start_ms || t_ms >= stim.start_ms + stim.duration_ms) return out;

  std::size_t hit = 0;
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
    if (stim.region(mesh.nodes[i])) {
      out[i] = stim.amplitude;
      ++hit;
    }
  if (hit == 0 && empty_region_warning) *empty_region_warning = true;
  return out;
}

IonicState make_resting_state(const IonicModel& model, std::size_t n_nodes) {
  IonicState st;
  const auto w0 = model.resting_w();
  const auto c0 = model.resting_c();
  st.w.resize(n_nodes * w0.size());
  st.c.resize(n_nodes * c0.size());
  for (std::size_t i = 0; i < n_nodes; ++i) {
    std::copy(w0.begin(), w0.end(), st.w.begin() + i * w0.size());
    std::copy(c0.begin(), c0.end(), st.c.begin() + i * c0.size());
  }
  return st;
}

void ionic_step(const IonicModel& model, std::span<const double> v, double dt, IonicState& state) {
  const std::size_t nw = static_cast<std::size_t>(model.n_gating());
  const std::size_t nc = static_cast<std::size_t>(model.n_concentration());
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      model.step_state(v[i], dt,
                       std::span<double>(state.w.data() + i * nw, nw),
                       std::span<double>(state.c.data() + i * nc, nc));
    } catch (const IonicSolveError& e) {
      throw IonicSolveError(std::string(e.what()) + " (node " + std::to_string(i) + ")");
    }
  }
}

std::vector<double> eval_ion_current(const IonicModel& model, std::span<const double> v,
                                     const IonicState& state) {
  const std::size_t nw = static_cast<std::size_t>(model.n_gating());
  const std::size_t nc = static_cast<std::size_t>(model.n_concentration());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = model.ion_current(v[i],
                               std::span<const double>(state.w.data() + i * nw, nw),
                               std::span<const double>(state.c.data() + i * nc, nc));
  return out;
}

}  // namespace cardio
