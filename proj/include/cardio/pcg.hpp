#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "cardio/csr.hpp"
#include "cardio/dense.hpp"

namespace cardio {

/// Per-solve record: residual_history[0] is the initial relative residual and
/// the history has iterations+1 entries.
struct SolveStats {
  int iterations = 0;
  double final_relative_residual = 0.0;
  std::vector<double> residual_history;
  double wall_time = 0.0;
  bool converged = false;
};

/// Fixed linear operator z = M^{-1} r applied once per PCG iteration.
/// Implementations must be deterministic and must not mutate internal state
/// in apply().
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override {
    std::copy(r.begin(), r.end(), z.begin());
  }
};

/// Block Jacobi over contiguous row ranges whose sizes differ by at most one;
/// each diagonal block is Cholesky-factorized at setup.
class BlockJacobiPreconditioner final : public Preconditioner {
 public:
  BlockJacobiPreconditioner(const CsrMatrix& a, int n_blocks);
  void apply(std::span<const double> r, std::span<double> z) const override;
  int n_blocks() const { return static_cast<int>(blocks_.size()); }

 private:
  struct Block {
    index_t begin;
    index_t end;
    CholeskyFactor factor;
  };
  std::vector<Block> blocks_;
};

struct PcgOptions {
  double rtol = 1e-5;
  int maxit = 10000;
  bool deflate_constants = false;  // singular Neumann systems: project onto zero-mean space
};

/// Signals p^T A p <= 0 on a component PCG cannot handle (indefinite matrix).
struct PcgBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Preconditioned conjugate gradients for SPD (or, with deflation, SPSD with
/// constant null space) matrices. x holds the initial guess on entry and the
/// solution on exit. Non-convergence within maxit is reported through
/// stats.converged, not an exception.
SolveStats pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
               const Preconditioner& m, const PcgOptions& opts);

}  // namespace cardio
