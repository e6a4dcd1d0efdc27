#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cardio/csr.hpp"
#include "cardio/dense.hpp"
#include "cardio/pcg.hpp"

namespace cardio {

// Algebraic multigrid with two coarsening families:
//  - MIS aggregation on the filtered strength graph with smoothed-aggregation
//    prolongators (edge weight w_ij = a_ij / sqrt(a_ii a_jj), edges below the
//    threshold cut before the independent-set pass);
//  - classical C/F coarsening from the strong-connection condition
//    |a_ij| >= alpha * max_k |a_ik| with direct interpolation.
// Restriction is always the prolongator transpose and coarse operators are
// Galerkin products.

enum class CoarseningKind { MisAggregation, StrongThreshold };

enum class SmootherKind { WeightedJacobi, SymmetricGaussSeidel, Chebyshev };

struct SmootherConfig {
  SmootherKind kind = SmootherKind::Chebyshev;
  double jacobi_omega = 2.0 / 3.0;
  int cheb_degree = 2;
  double eig_lo_frac = 0.05;
  double eig_hi_frac = 1.05;
  int esteig_iters = 10;
};

struct AmgConfig {
  CoarseningKind coarsening = CoarseningKind::MisAggregation;
  double threshold = 0.06;   // MIS branch: edge-weight cut
  double strong_alpha = 0.5; // strong-threshold branch
  int prolongator_smoothing_steps = 1;
  SmootherConfig smoother;
  int mu1 = 1;  // pre-smoothing applications
  int mu2 = 1;  // post-smoothing applications
  int coarse_eq_limit = 100;
  int max_levels = 25;

  void validate() const;
};

/// Symmetric strength graph of |a_ij|/sqrt(a_ii a_jj) with edges below the
/// threshold removed. Neighbor lists are sorted ascending.
struct FilteredGraph {
  index_t n = 0;
  std::vector<std::int64_t> offsets;
  std::vector<index_t> neighbors;
  std::vector<double> strength;

  std::int64_t n_edges() const { return static_cast<std::int64_t>(neighbors.size()) / 2; }
};

FilteredGraph filter_graph(const CsrMatrix& a, double threshold);

/// Seeds form a maximal independent set of the filtered graph (greedy in
/// ascending node order); every non-seed joins its strongest seed neighbor,
/// ties toward the lower seed index. Clusters partition all nodes.
struct Aggregation {
  std::vector<index_t> seeds;
  std::vector<index_t> labels;  // node -> cluster id
  index_t n_clusters = 0;
};

Aggregation mis_aggregate(const FilteredGraph& graph);

/// P_ij = |C_j|^{-1/2} for i in C_j: one nonzero per row, unit column norms.
CsrMatrix build_tentative_prolongator(const std::vector<index_t>& labels, index_t n_clusters);

/// steps applications of P <- (I - omega D^{-1} A) P with omega = 4/(3 lambda)
/// and lambda an upper estimate of the spectrum of D^{-1} A (estimated when
/// not supplied).
CsrMatrix smooth_prolongator(const CsrMatrix& a, const CsrMatrix& p_tent, int steps,
                             std::optional<double> lambda_hat = std::nullopt);

/// Classical one-pass C/F splitting plus direct interpolation.
struct StrongCoarsening {
  std::vector<char> is_coarse;  // per fine node
  CsrMatrix interpolation;      // n_fine x n_coarse
  index_t n_coarse = 0;
};

StrongCoarsening strong_coarsen(const CsrMatrix& a, double alpha);

/// Largest eigenvalue of D^{-1/2} A D^{-1/2} (= spectrum of D^{-1} A) by a
/// deterministic Lanczos run of the given length.
double estimate_lambda_max_dinv_a(const CsrMatrix& a, int iters);

/// One smoother application advances x by `steps` sweeps toward A x = b.
/// Chebyshev runs over [eig_lo_frac, eig_hi_frac] * lambda_hat on the
/// diagonally preconditioned operator.
void smoother_apply(const SmootherConfig& config, const CsrMatrix& a, std::span<const double> b,
                    std::span<double> x, int steps,
                    std::optional<double> lambda_hat = std::nullopt);

struct AmgLevel {
  CsrMatrix a;
  CsrMatrix p;  // empty on the coarsest level
  CsrMatrix r;  // p transposed
  std::vector<double> inv_diag;
  double smoother_lambda_max = 0.0;
};

struct AmgHierarchy {
  AmgConfig config;
  std::vector<AmgLevel> levels;
  std::shared_ptr<const SymmetricEigenFactor> coarse_solver;
  bool stagnated = false;  // coarsening stopped making progress

  int n_levels() const { return static_cast<int>(levels.size()); }
  double operator_complexity() const;
  std::string summary_text() const;
};

AmgHierarchy amg_setup(const CsrMatrix& a, const AmgConfig& config);

/// One V-cycle for A x = b starting from the x passed in (Alg. MGV); the
/// coarsest level is solved directly.
void v_cycle(const AmgHierarchy& h, std::span<const double> b, std::span<double> x);

/// PCG-compatible preconditioner: one V-cycle from a zero initial guess,
/// which keeps the application a fixed linear operator.
class AmgPreconditioner final : public Preconditioner {
 public:
  explicit AmgPreconditioner(std::shared_ptr<const AmgHierarchy> h) : h_(std::move(h)) {}
  void apply(std::span<const double> r, std::span<double> z) const override;
  const AmgHierarchy& hierarchy() const { return *h_; }

 private:
  std::shared_ptr<const AmgHierarchy> h_;
};

}  // namespace cardio
