#include "cardio/pcg.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "cardio/vec.hpp"

namespace cardio {

BlockJacobiPreconditioner::BlockJacobiPreconditioner(const CsrMatrix& a, int n_blocks) {
  if (a.n_rows != a.n_cols) throw std::invalid_argument("block jacobi: matrix not square");
  if (n_blocks < 1) throw std::invalid_argument("block jacobi: n_blocks must be >= 1");
  const index_t n = a.n_rows;
  const index_t nb = std::min<index_t>(n_blocks, std::max<index_t>(n, 1));
  const index_t base = nb > 0 ? n / nb : 0;
  const index_t extra = nb > 0 ? n % nb : 0;

  index_t begin = 0;
  for (index_t blk = 0; blk < nb; ++blk) {
    const index_t size = base + (blk < extra ? 1 : 0);
    const index_t end = begin + size;
    DenseMatrix d(size);
    for (index_t i = begin; i < end; ++i)
      for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
        const index_t j = a.col_idx[k];
        if (j >= begin && j < end) d(i - begin, j - begin) = a.vals[k];
      }
    try {
      blocks_.push_back(Block{begin, end, CholeskyFactor(std::move(d))});
    } catch (const std::runtime_error&) {
      throw std::runtime_error("block jacobi: singular or indefinite diagonal block " +
                               std::to_string(blk) + " (rows " + std::to_string(begin) + ".." +
                               std::to_string(end - 1) + ")");
    }
    begin = end;
  }
}

void BlockJacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (const Block& blk : blocks_) {
    const std::size_t off = static_cast<std::size_t>(blk.begin);
    const std::size_t len = static_cast<std::size_t>(blk.end - blk.begin);
    blk.factor.solve(r.subspan(off, len), z.subspan(off, len));
  }
}

SolveStats pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
               const Preconditioner& m, const PcgOptions& opts) {
  if (a.n_rows != a.n_cols) throw std::invalid_argument("pcg: matrix not square");
  if (static_cast<index_t>(b.size()) != a.n_rows || static_cast<index_t>(x.size()) != a.n_rows)
    throw std::invalid_argument("pcg: dimension mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  SolveStats stats;

  std::vector<double> rhs(b.begin(), b.end());
  if (opts.deflate_constants) {
    remove_mean(rhs);
    remove_mean(x);
  }

  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.residual_history = {0.0};
    stats.converged = true;
    stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  spmv(a, x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  if (opts.deflate_constants) remove_mean(r);

  double rnorm = norm2(r);
  stats.residual_history.push_back(rnorm / bnorm);
  if (rnorm <= opts.rtol * bnorm) {
    stats.converged = true;
    stats.final_relative_residual = rnorm / bnorm;
    stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
  }

  m.apply(r, z);
  if (opts.deflate_constants) remove_mean(z);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = dot(r, z);

  for (int it = 1; it <= opts.maxit; ++it) {
    spmv(a, p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) {
      throw PcgBreakdown("pcg: p^T A p = " + std::to_string(pq) +
                         " <= 0 at iteration " + std::to_string(it) +
                         " (matrix not positive definite on the search space)");
    }
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    if (opts.deflate_constants) {
      remove_mean(x);
      remove_mean(r);
    }
    rnorm = norm2(r);
    stats.residual_history.push_back(rnorm / bnorm);
    stats.iterations = it;
    if (rnorm <= opts.rtol * bnorm) {
      stats.converged = true;
      break;
    }
    m.apply(r, z);
    if (opts.deflate_constants) remove_mean(z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  stats.final_relative_residual = stats.residual_history.back();
  stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return stats;
}

}  // namespace cardio
