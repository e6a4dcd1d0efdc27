#include "cardio/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cardio {

namespace {

struct KeyInfo {
  const char* key;
  const char* default_value;
  const char* description;
};

// the full schema; every honored option has a named key
const KeyInfo kSchema[] = {
    {"mesh.kind", "ellipsoid", "ellipsoid | box | file"},
    {"mesh.path", "", "mesh file to load when mesh.kind = file"},
    {"mesh.n1", "32", "cells along theta (ellipsoid) or x (box)"},
    {"mesh.n2", "32", "cells along phi (ellipsoid) or y (box)"},
    {"mesh.n3", "16", "cells along r (ellipsoid) or z (box)"},
    {"mesh.lx", "1.0", "box length x (cm)"},
    {"mesh.ly", "1.0", "box length y (cm)"},
    {"mesh.lz", "1.0", "box length z (cm)"},
    {"mesh.a1", "2.2", "inner semi-axis a (cm)"},
    {"mesh.a2", "3.3", "outer semi-axis a (cm)"},
    {"mesh.b1", "2.2", "inner semi-axis b (cm)"},
    {"mesh.b2", "3.3", "outer semi-axis b (cm)"},
    {"mesh.c1", "5.9", "inner semi-axis c (cm)"},
    {"mesh.c2", "6.4", "outer semi-axis c (cm)"},
    {"mesh.theta_min", "-4.71238898038469", "circumferential range start (rad)"},
    {"mesh.theta_max", "1.5707963267948966", "circumferential range end (rad)"},
    {"mesh.phi_min", "-1.1780972450961724", "latitudinal range start (rad)"},
    {"mesh.phi_max", "0.39269908169872414", "latitudinal range end (rad)"},
    {"fibers.endo_deg", "60", "fiber angle at the endocardium (deg)"},
    {"fibers.epi_deg", "-60", "fiber angle at the epicardium (deg)"},
    {"conductivity.sigma_l_i", "3.0", "intracellular along-fiber (mS/cm)"},
    {"conductivity.sigma_t_i", "0.31525", "intracellular transverse (mS/cm)"},
    {"conductivity.sigma_n_i", "0.031525", "intracellular sheet-normal (mS/cm)"},
    {"conductivity.sigma_l_e", "2.0", "extracellular along-fiber (mS/cm)"},
    {"conductivity.sigma_t_e", "1.3514", "extracellular transverse (mS/cm)"},
    {"conductivity.sigma_n_e", "0.6757", "extracellular sheet-normal (mS/cm)"},
    {"ionic.model", "rogers_mcculloch", "membrane model"},
    {"ionic.g", "1.5", "cubic current coefficient (1/ms)"},
    {"ionic.v_th", "0.13", "activation threshold (internal scale)"},
    {"ionic.v_p", "1.0", "plateau potential (internal scale)"},
    {"ionic.eta1", "4.4", "recovery current coupling (1/ms)"},
    {"ionic.eta2", "0.012", "gating rate (1/ms)"},
    {"ionic.eta3", "1.0", "gating decay"},
    {"membrane.c_m", "15.0", "capacitance lump chi*C_m (code units)"},
    {"membrane.current_scale", "0.0015",
     "activation rate (1/ms) per mA/cm^3 of applied current"},
    {"stimulus.amplitude", "350.0", "applied current density (mA/cm^3)"},
    {"stimulus.start_ms", "0.0", "stimulus onset (ms)"},
    {"stimulus.duration_ms", "1.0", "stimulus length (ms)"},
    {"stimulus.radius_cm", "0.5", "radius of the stimulated ball (cm)"},
    {"stimulus.center", "auto", "auto or 'x y z' (cm)"},
    {"time.dt_ms", "0.05", "timestep (ms)"},
    {"time.t_end_ms", "5.0", "simulated window (ms)"},
    {"solver.rtol", "1e-5", "PCG relative residual tolerance"},
    {"solver.maxit", "10000", "PCG iteration cap"},
    {"elliptic.preconditioner", "amg", "amg | identity"},
    {"parabolic.preconditioner", "block_jacobi", "block_jacobi | identity"},
    {"parabolic.n_blocks", "0", "Block Jacobi block count (0 = auto, ~64 rows per block)"},
    {"amg.branch", "mis", "mis | strong (coarsening family)"},
    {"amg.threshold", "0.06", "MIS aggregation edge-weight threshold"},
    {"amg.strong_threshold", "0.5", "strong threshold alpha"},
    {"amg.nsmooths", "1", "prolongator smoothing steps"},
    {"amg.coarse_eq_limit", "100", "coarsest-level equation cap"},
    {"amg.max_levels", "25", "hierarchy depth cap"},
    {"amg.mu1", "1", "pre-smoothing applications"},
    {"amg.mu2", "1", "post-smoothing applications"},
    {"smoother.kind", "chebyshev", "chebyshev | jacobi | sgs"},
    {"smoother.degree", "2", "Chebyshev polynomial degree"},
    {"smoother.eig_lo_frac", "0.05", "Chebyshev interval lower fraction"},
    {"smoother.eig_hi_frac", "1.05", "Chebyshev interval upper fraction"},
    {"smoother.esteig_iters", "10", "Lanczos iterations for the eigenvalue estimate"},
    {"smoother.jacobi_omega", "0.6666666666666666", "weighted Jacobi relaxation"},
    {"output.dir", "out", "artifact directory"},
    {"output.trace", "trace.csv", "per-step trace file name"},
    {"output.snapshot_every_steps", "0", "VTK snapshot cadence (0 = off)"},
    {"output.timings", "wall", "wall | none (none zeroes timing columns)"},
};

const KeyInfo* find_key(const std::string& key) {
  for (const KeyInfo& info : kSchema)
    if (key == info.key) return &info;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config::Config() {
  for (const KeyInfo& info : kSchema) values_[info.key] = info.default_value;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

void Config::apply_override(const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + key_value + "' is not of the form key=value");
  set(trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = get_string(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
  return v;
}

int Config::get_int(const std::string& key) const {
  const std::string& s = get_string(key);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "': '" + s + "' is not an integer");
  return static_cast<int>(v);
}

bool Config::get_bool(const std::string& key) const {
  const std::string& s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "': '" + s + "' is not a boolean");
}

bool Config::is_overridden(const std::string& key) const {
  const KeyInfo* info = find_key(key);
  if (!info) throw ConfigError("unknown config key '" + key + "'");
  return get_string(key) != info->default_value;
}

std::string Config::schema_text() {
  std::ostringstream out;
  for (const KeyInfo& info : kSchema)
    out << info.key << " = " << info.default_value << "    # " << info.description << "\n";
  return out.str();
}

}  // namespace cardio
