#include "cardio/amg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "cardio/vec.hpp"

namespace cardio {

void AmgConfig::validate() const {
  if (mu1 + mu2 < 1) throw std::invalid_argument("amg: mu1 + mu2 must be >= 1");
  if (coarse_eq_limit < 1) throw std::invalid_argument("amg: coarse_eq_limit must be >= 1");
  if (max_levels < 1) throw std::invalid_argument("amg: max_levels must be >= 1");
  if (threshold < 0.0) throw std::invalid_argument("amg: threshold must be >= 0");
  if (coarsening == CoarseningKind::StrongThreshold && !(strong_alpha > 0.0 && strong_alpha < 1.0))
    throw std::invalid_argument("amg: strong threshold must lie in (0,1)");
  if (prolongator_smoothing_steps < 0)
    throw std::invalid_argument("amg: prolongator smoothing steps must be >= 0");
  if (smoother.kind == SmootherKind::Chebyshev &&
      !(smoother.eig_hi_frac > smoother.eig_lo_frac && smoother.eig_lo_frac > 0.0))
    throw std::invalid_argument("amg: chebyshev eigenvalue fractions must satisfy 0 < lo < hi");
}

FilteredGraph filter_graph(const CsrMatrix& a, double threshold) {
  if (a.n_rows != a.n_cols) throw std::invalid_argument("filter_graph: matrix not square");
  const std::vector<double> diag = diagonal(a);
  std::vector<double> inv_sqrt(diag.size());
  for (index_t i = 0; i < a.n_rows; ++i) {
    if (!(diag[i] > 0.0))
      throw std::invalid_argument("filter_graph: non-positive diagonal entry at row " +
                                  std::to_string(i));
    inv_sqrt[i] = 1.0 / std::sqrt(diag[i]);
  }

  FilteredGraph g;
  g.n = a.n_rows;
  g.offsets.assign(a.n_rows + 1, 0);
  for (index_t i = 0; i < a.n_rows; ++i) {
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const index_t j = a.col_idx[k];
      if (j == i || a.vals[k] == 0.0) continue;
      const double w = std::abs(a.vals[k]) * inv_sqrt[i] * inv_sqrt[j];
      if (w >= threshold) g.offsets[i + 1] += 1;
    }
  }
  for (index_t i = 0; i < a.n_rows; ++i) g.offsets[i + 1] += g.offsets[i];
  g.neighbors.resize(g.offsets.back());
  g.strength.resize(g.offsets.back());
  std::vector<std::int64_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (index_t i = 0; i < a.n_rows; ++i) {
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const index_t j = a.col_idx[k];
      if (j == i || a.vals[k] == 0.0) continue;
      const double w = std::abs(a.vals[k]) * inv_sqrt[i] * inv_sqrt[j];
      if (w >= threshold) {
        g.neighbors[fill[i]] = j;
        g.strength[fill[i]] = w;
        ++fill[i];
      }
    }
  }
  return g;
}

Aggregation mis_aggregate(const FilteredGraph& graph) {
  const index_t n = graph.n;
  Aggregation agg;
  agg.labels.assign(n, -1);

  // greedy maximal independent set in ascending node order
  std::vector<char> is_seed(n, 0);
  for (index_t i = 0; i < n; ++i) {
    bool blocked = false;
    for (std::int64_t k = graph.offsets[i]; k < graph.offsets[i + 1]; ++k)
      if (is_seed[graph.neighbors[k]]) {
        blocked = true;
        break;
      }
    if (!blocked) {
      is_seed[i] = 1;
      agg.seeds.push_back(i);
    }
  }

  std::vector<index_t> seed_cluster(n, -1);
  for (index_t c = 0; c < static_cast<index_t>(agg.seeds.size()); ++c) {
    seed_cluster[agg.seeds[c]] = c;
    agg.labels[agg.seeds[c]] = c;
  }
  agg.n_clusters = static_cast<index_t>(agg.seeds.size());

  // each non-seed joins the strongest adjacent seed; neighbor lists are
  // ascending, so keeping the first maximum breaks ties toward lower index
  for (index_t i = 0; i < n; ++i) {
    if (is_seed[i]) continue;
    index_t best = -1;
    double best_w = -1.0;
    for (std::int64_t k = graph.offsets[i]; k < graph.offsets[i + 1]; ++k) {
      const index_t j = graph.neighbors[k];
      if (is_seed[j] && graph.strength[k] > best_w) {
        best_w = graph.strength[k];
        best = j;
      }
    }
    if (best >= 0) {
      agg.labels[i] = seed_cluster[best];
    } else {
      agg.labels[i] = agg.n_clusters;  // isolated after filtering: singleton
      agg.n_clusters += 1;
    }
  }
  return agg;
}

CsrMatrix build_tentative_prolongator(const std::vector<index_t>& labels, index_t n_clusters) {
  const index_t n = static_cast<index_t>(labels.size());
  std::vector<std::int64_t> counts(n_clusters, 0);
  for (index_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= n_clusters)
      throw std::invalid_argument("tentative prolongator: labels do not form a partition");
    counts[labels[i]] += 1;
  }
  for (index_t c = 0; c < n_clusters; ++c)
    if (counts[c] == 0)
      throw std::invalid_argument("tentative prolongator: empty cluster " + std::to_string(c));

  CsrMatrix p;
  p.n_rows = n;
  p.n_cols = n_clusters;
  p.row_ptr.resize(n + 1);
  p.col_idx.resize(n);
  p.vals.resize(n);
  for (index_t i = 0; i < n; ++i) {
    p.row_ptr[i] = i;
    p.col_idx[i] = labels[i];
    p.vals[i] = 1.0 / std::sqrt(static_cast<double>(counts[labels[i]]));
  }
  p.row_ptr[n] = n;
  return p;
}

double estimate_lambda_max_dinv_a(const CsrMatrix& a, int iters) {
  const index_t n = a.n_rows;
  const std::vector<double> diag = diagonal(a);
  std::vector<double> inv_sqrt(n);
  for (index_t i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0))
      throw std::invalid_argument("eigenvalue estimate: non-positive diagonal at row " +
                                  std::to_string(i));
    inv_sqrt[i] = 1.0 / std::sqrt(diag[i]);
  }

  // Lanczos on the symmetrized operator C = D^{-1/2} A D^{-1/2}
  const auto apply_c = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::vector<double> t(n);
    for (index_t i = 0; i < n; ++i) t[i] = inv_sqrt[i] * x[i];
    spmv(a, t, y);
    for (index_t i = 0; i < n; ++i) y[i] *= inv_sqrt[i];
  };

  DeterministicSequence seq(0x5ca1ab1e);
  std::vector<double> v = seq.vector(n);
  {
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
  }
  std::vector<double> v_prev(n, 0.0), w(n);
  std::vector<double> alphas, betas;
  double beta_prev = 0.0;
  const int m = std::max(1, iters);
  for (int j = 0; j < m; ++j) {
    apply_c(v, w);
    const double alpha = dot(v, w);
    alphas.push_back(alpha);
    for (index_t i = 0; i < n; ++i) w[i] -= alpha * v[i] + beta_prev * v_prev[i];
    const double beta = norm2(w);
    if (beta < 1e-14 * (std::abs(alpha) + 1.0)) break;
    if (j + 1 < m) betas.push_back(beta);
    beta_prev = beta;
    v_prev = v;
    for (index_t i = 0; i < n; ++i) v[i] = w[i] / beta;
  }

  const int k = static_cast<int>(alphas.size());
  DenseMatrix t(k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = alphas[i];
    if (i + 1 < k && i < static_cast<int>(betas.size())) {
      t(i, i + 1) = betas[i];
      t(i + 1, i) = betas[i];
    }
  }
  const SymmetricEigenFactor eig(std::move(t), 0.0);
  double lmax = -std::numeric_limits<double>::infinity();
  for (double l : eig.eigenvalues()) lmax = std::max(lmax, l);
  if (!(lmax > 0.0)) throw std::runtime_error("eigenvalue estimate: nonpositive lambda");
  return lmax;
}

CsrMatrix smooth_prolongator(const CsrMatrix& a, const CsrMatrix& p_tent, int steps,
                             std::optional<double> lambda_hat) {
  if (steps < 0) throw std::invalid_argument("smooth_prolongator: steps must be >= 0");
  if (steps == 0) return p_tent;
  const std::vector<double> diag = diagonal(a);
  for (index_t i = 0; i < a.n_rows; ++i)
    if (diag[i] == 0.0)
      throw std::invalid_argument("smooth_prolongator: zero diagonal at row " + std::to_string(i));

  const double lambda = lambda_hat ? *lambda_hat : estimate_lambda_max_dinv_a(a, 10);
  if (!(lambda > 0.0)) throw std::invalid_argument("smooth_prolongator: lambda must be positive");
  const double omega = 4.0 / (3.0 * lambda);

  CsrMatrix p = p_tent;
  for (int s = 0; s < steps; ++s) {
    CsrMatrix ap = multiply(a, p);
    for (index_t i = 0; i < ap.n_rows; ++i)
      for (std::int64_t k = ap.row_ptr[i]; k < ap.row_ptr[i + 1]; ++k) ap.vals[k] /= diag[i];
    p = add(p, ap, 1.0, -omega);
  }
  return p;
}

StrongCoarsening strong_coarsen(const CsrMatrix& a, double alpha) {
  if (a.n_rows != a.n_cols) throw std::invalid_argument("strong_coarsen: matrix not square");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("strong_coarsen: alpha must lie in (0,1)");
  const index_t n = a.n_rows;

  std::int64_t n_pos = 0, n_neg = 0;
  for (index_t i = 0; i < n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      if (a.col_idx[k] == i) continue;
      if (a.vals[k] > 0.0) ++n_pos;
      if (a.vals[k] < 0.0) ++n_neg;
    }
  if (n_pos > n_neg)
    std::fprintf(stderr,
                 "strong_coarsen: warning: off-diagonals are predominantly positive "
                 "(%lld positive vs %lld negative); interpolation quality may suffer\n",
                 static_cast<long long>(n_pos), static_cast<long long>(n_neg));

  // strong-neighbor lists per row
  std::vector<std::int64_t> s_off(n + 1, 0);
  std::vector<index_t> s_adj;
  for (index_t i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col_idx[k] != i) row_max = std::max(row_max, std::abs(a.vals[k]));
    if (row_max > 0.0) {
      const double cut = alpha * row_max;
      for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        if (a.col_idx[k] != i && std::abs(a.vals[k]) >= cut) s_adj.push_back(a.col_idx[k]);
    }
    s_off[i + 1] = static_cast<std::int64_t>(s_adj.size());
  }

  // transpose lists: who strongly depends on me
  std::vector<std::int64_t> t_off(n + 1, 0);
  for (index_t j : s_adj) t_off[j + 1] += 1;
  for (index_t i = 0; i < n; ++i) t_off[i + 1] += t_off[i];
  std::vector<index_t> t_adj(s_adj.size());
  {
    std::vector<std::int64_t> fill(t_off.begin(), t_off.end() - 1);
    for (index_t i = 0; i < n; ++i)
      for (std::int64_t k = s_off[i]; k < s_off[i + 1]; ++k) t_adj[fill[s_adj[k]]++] = i;
  }

  // greedy C/F pass: highest influence count first, lazy max-heap
  enum : char { kUnassigned = 0, kCoarse = 1, kFine = 2 };
  std::vector<char> state(n, kUnassigned);
  std::vector<std::int64_t> weight(n);
  using Entry = std::pair<std::int64_t, index_t>;  // (weight, -index) ordering via custom cmp
  const auto cmp = [](const Entry& x, const Entry& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second > y.second;  // smaller index wins
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (index_t i = 0; i < n; ++i) {
    weight[i] = t_off[i + 1] - t_off[i];
    heap.push({weight[i], i});
  }

  index_t n_coarse = 0;
  while (!heap.empty()) {
    const auto [w, i] = heap.top();
    heap.pop();
    if (state[i] != kUnassigned || w != weight[i]) continue;  // stale entry
    state[i] = kCoarse;
    ++n_coarse;
    for (std::int64_t k = t_off[i]; k < t_off[i + 1]; ++k) {
      const index_t j = t_adj[k];  // j strongly depends on the new C point
      if (state[j] != kUnassigned) continue;
      state[j] = kFine;
      for (std::int64_t kk = s_off[j]; kk < s_off[j + 1]; ++kk) {
        const index_t m = s_adj[kk];
        if (state[m] == kUnassigned) {
          weight[m] += 1;
          heap.push({weight[m], m});
        }
      }
    }
  }

  StrongCoarsening result;
  result.is_coarse.assign(n, 0);
  result.n_coarse = n_coarse;
  std::vector<index_t> coarse_id(n, -1);
  index_t next = 0;
  for (index_t i = 0; i < n; ++i)
    if (state[i] == kCoarse) {
      result.is_coarse[i] = 1;
      coarse_id[i] = next++;
    }

  // direct interpolation: F rows distribute over strong C neighbors with
  // weights proportional to -a_ij, normalized to unit row sum
  TripletBuilder builder(n, n_coarse);
  for (index_t i = 0; i < n; ++i) {
    if (result.is_coarse[i]) {
      builder.add(i, coarse_id[i], 1.0);
      continue;
    }
    double denom = 0.0;
    index_t n_strong_c = 0;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const index_t j = a.col_idx[k];
      if (j == i || !result.is_coarse[j]) continue;
      if (!std::binary_search(s_adj.begin() + s_off[i], s_adj.begin() + s_off[i + 1], j)) continue;
      denom += -a.vals[k];
      ++n_strong_c;
    }
    if (n_strong_c == 0)
      throw std::runtime_error("strong_coarsen: fine point " + std::to_string(i) +
                               " has no strong coarse neighbor");
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const index_t j = a.col_idx[k];
      if (j == i || !result.is_coarse[j]) continue;
      if (!std::binary_search(s_adj.begin() + s_off[i], s_adj.begin() + s_off[i + 1], j)) continue;
      const double w = denom > 0.0 ? -a.vals[k] / denom : 1.0 / n_strong_c;
      builder.add(i, coarse_id[j], w);
    }
  }
  result.interpolation = builder.build();
  return result;
}

// --- smoothers --------------------------------------------------------------

namespace {

void jacobi_sweeps(const CsrMatrix& a, const std::vector<double>& inv_diag, double omega,
                   std::span<const double> b, std::span<double> x, int steps) {
  const index_t n = a.n_rows;
  std::vector<double> r(n);
  for (int s = 0; s < steps; ++s) {
    spmv(a, x, r);
    for (index_t i = 0; i < n; ++i) x[i] += omega * inv_diag[i] * (b[i] - r[i]);
  }
}

void sgs_sweeps(const CsrMatrix& a, std::span<const double> b, std::span<double> x, int steps) {
  const index_t n = a.n_rows;
  for (int s = 0; s < steps; ++s) {
    for (index_t i = 0; i < n; ++i) {
      double sum = b[i], diag = 0.0;
      for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
        const index_t j = a.col_idx[k];
        if (j == i)
          diag = a.vals[k];
        else
          sum -= a.vals[k] * x[j];
      }
      x[i] = sum / diag;
    }
    for (index_t i = n; i-- > 0;) {
      double sum = b[i], diag = 0.0;
      for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
        const index_t j = a.col_idx[k];
        if (j == i)
          diag = a.vals[k];
        else
          sum -= a.vals[k] * x[j];
      }
      x[i] = sum / diag;
    }
  }
}

void chebyshev_sweeps(const CsrMatrix& a, const std::vector<double>& inv_diag, double lo,
                      double hi, int degree, std::span<const double> b, std::span<double> x,
                      int steps) {
  const index_t n = a.n_rows;
  const double theta = 0.5 * (hi + lo);
  const double delta = 0.5 * (hi - lo);
  const double sigma1 = theta / delta;
  std::vector<double> r(n), z(n), d(n);
  for (int s = 0; s < steps; ++s) {
    spmv(a, x, r);
    for (index_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    for (index_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rho = 1.0 / sigma1;
    for (index_t i = 0; i < n; ++i) d[i] = z[i] / theta;
    for (int k = 0;;) {
      for (index_t i = 0; i < n; ++i) x[i] += d[i];
      if (++k >= degree) break;
      std::vector<double> ad(n);
      spmv(a, d, ad);
      for (index_t i = 0; i < n; ++i) r[i] -= ad[i];
      for (index_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rho_next = 1.0 / (2.0 * sigma1 - rho);
      for (index_t i = 0; i < n; ++i) d[i] = rho_next * rho * d[i] + (2.0 * rho_next / delta) * z[i];
      rho = rho_next;
    }
  }
}

void apply_smoother_core(const SmootherConfig& cfg, const CsrMatrix& a,
                         const std::vector<double>& inv_diag, double lambda_max,
                         std::span<const double> b, std::span<double> x, int steps) {
  switch (cfg.kind) {
    case SmootherKind::WeightedJacobi:
      jacobi_sweeps(a, inv_diag, cfg.jacobi_omega, b, x, steps);
      break;
    case SmootherKind::SymmetricGaussSeidel:
      sgs_sweeps(a, b, x, steps);
      break;
    case SmootherKind::Chebyshev: {
      if (!(lambda_max > 0.0))
        throw std::runtime_error("chebyshev smoother: nonpositive eigenvalue estimate");
      chebyshev_sweeps(a, inv_diag, cfg.eig_lo_frac * lambda_max, cfg.eig_hi_frac * lambda_max,
                       cfg.cheb_degree, b, x, steps);
      break;
    }
  }
}

std::vector<double> checked_inv_diag(const CsrMatrix& a) {
  std::vector<double> d = diagonal(a);
  for (index_t i = 0; i < a.n_rows; ++i) {
    if (!(d[i] > 0.0))
      throw std::invalid_argument("smoother: non-positive diagonal at row " + std::to_string(i));
    d[i] = 1.0 / d[i];
  }
  return d;
}

}  // namespace

void smoother_apply(const SmootherConfig& config, const CsrMatrix& a, std::span<const double> b,
                    std::span<double> x, int steps, std::optional<double> lambda_hat) {
  const std::vector<double> inv_diag = checked_inv_diag(a);
  double lambda = 0.0;
  if (config.kind == SmootherKind::Chebyshev)
    lambda = lambda_hat ? *lambda_hat : estimate_lambda_max_dinv_a(a, config.esteig_iters);
  apply_smoother_core(config, a, inv_diag, lambda, b, x, steps);
}

// --- setup and cycle --------------------------------------------------------

AmgHierarchy amg_setup(const CsrMatrix& a, const AmgConfig& config) {
  config.validate();
  if (a.n_rows != a.n_cols) throw std::invalid_argument("amg_setup: matrix not square");
  if (symmetry_gap(a) > 1e-10 * (max_abs(a) + 1e-300))
    throw std::invalid_argument("amg_setup: matrix is not symmetric");

  AmgHierarchy h;
  h.config = config;
  h.levels.push_back(AmgLevel{a, {}, {}, {}, 0.0});

  while (static_cast<int>(h.levels.size()) < config.max_levels &&
         h.levels.back().a.n_rows > config.coarse_eq_limit) {
    const CsrMatrix& a_k = h.levels.back().a;
    CsrMatrix p;
    index_t n_coarse = 0;
    if (config.coarsening == CoarseningKind::MisAggregation) {
      const FilteredGraph g = filter_graph(a_k, config.threshold);
      const Aggregation agg = mis_aggregate(g);
      n_coarse = agg.n_clusters;
      if (n_coarse >= a_k.n_rows) break;  // coarsening stagnated
      const CsrMatrix p_tent = build_tentative_prolongator(agg.labels, agg.n_clusters);
      p = smooth_prolongator(a_k, p_tent, config.prolongator_smoothing_steps);
    } else {
      const StrongCoarsening sc = strong_coarsen(a_k, config.strong_alpha);
      n_coarse = sc.n_coarse;
      if (n_coarse >= a_k.n_rows) break;
      p = sc.interpolation;
    }

    CsrMatrix r = transpose(p);
    CsrMatrix a_next = multiply(r, multiply(a_k, p));
    // Galerkin product of a symmetric matrix: enforce exact symmetry against
    // rounding in the sparse products
    a_next = add(a_next, transpose(a_next), 0.5, 0.5);

    h.levels.back().p = std::move(p);
    h.levels.back().r = std::move(r);
    h.levels.push_back(AmgLevel{std::move(a_next), {}, {}, {}, 0.0});
  }
  h.stagnated = h.levels.back().a.n_rows > config.coarse_eq_limit &&
                static_cast<int>(h.levels.size()) < config.max_levels;

  // smoother state on all levels that smooth (every level but the coarsest)
  for (std::size_t k = 0; k + 1 < h.levels.size(); ++k) {
    AmgLevel& lvl = h.levels[k];
    lvl.inv_diag = checked_inv_diag(lvl.a);
    if (config.smoother.kind == SmootherKind::Chebyshev)
      lvl.smoother_lambda_max = estimate_lambda_max_dinv_a(lvl.a, config.smoother.esteig_iters);
  }

  h.coarse_solver =
      std::make_shared<SymmetricEigenFactor>(DenseMatrix::from_csr(h.levels.back().a));
  return h;
}

namespace {

void cycle_level(const AmgHierarchy& h, std::size_t k, std::span<const double> b,
                 std::span<double> x) {
  const AmgLevel& lvl = h.levels[k];
  if (k + 1 == h.levels.size()) {
    h.coarse_solver->solve(b, x);  // direct solve on the coarsest grid
    return;
  }
  const AmgConfig& cfg = h.config;
  apply_smoother_core(cfg.smoother, lvl.a, lvl.inv_diag, lvl.smoother_lambda_max, b, x, cfg.mu1);

  const index_t n = lvl.a.n_rows;
  std::vector<double> r(n);
  spmv(lvl.a, x, r);
  for (index_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  std::vector<double> r_coarse(lvl.p.n_cols);
  spmv(lvl.r, r, r_coarse);

  std::vector<double> e_coarse(lvl.p.n_cols, 0.0);
  cycle_level(h, k + 1, r_coarse, e_coarse);

  std::vector<double> e(n);
  spmv(lvl.p, e_coarse, e);
  for (index_t i = 0; i < n; ++i) x[i] += e[i];

  apply_smoother_core(cfg.smoother, lvl.a, lvl.inv_diag, lvl.smoother_lambda_max, b, x, cfg.mu2);
}

}  // namespace

void v_cycle(const AmgHierarchy& h, std::span<const double> b, std::span<double> x) {
  if (h.levels.empty()) throw std::invalid_argument("v_cycle: empty hierarchy");
  if (static_cast<index_t>(b.size()) != h.levels.front().a.n_rows ||
      static_cast<index_t>(x.size()) != h.levels.front().a.n_rows)
    throw std::invalid_argument("v_cycle: dimension mismatch");
  cycle_level(h, 0, b, x);
}

void AmgPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  v_cycle(*h_, r, z);
}

double AmgHierarchy::operator_complexity() const {
  double total = 0.0;
  for (const AmgLevel& lvl : levels) total += static_cast<double>(lvl.a.nnz());
  return total / static_cast<double>(levels.front().a.nnz());
}

std::string AmgHierarchy::summary_text() const {
  std::ostringstream out;
  out << "amg hierarchy: " << levels.size() << " level(s), operator complexity "
      << operator_complexity();
  if (stagnated) out << " [coarsening stagnated]";
  out << "\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    out << "  level " << k << ": n = " << levels[k].a.n_rows << ", nnz = " << levels[k].a.nnz();
    if (k + 1 == levels.size())
      out << " (direct)";
    else if (config.smoother.kind == SmootherKind::Chebyshev)
      out << " (chebyshev, lambda_hat = " << levels[k].smoother_lambda_max << ")";
    out << "\n";
  }
  return out.str();
}

}  // namespace cardio
