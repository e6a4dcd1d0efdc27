#include "cardio/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cardio {

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& m) {
  if (m.n_rows != m.n_cols) throw std::invalid_argument("from_csr: matrix not square");
  DenseMatrix d(m.n_rows);
  for (index_t i = 0; i < m.n_rows; ++i)
    for (std::int64_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) d(i, m.col_idx[k]) = m.vals[k];
  return d;
}

CholeskyFactor::CholeskyFactor(DenseMatrix a) : l_(a.n) {
  const int n = a.n;
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0)) throw std::runtime_error("cholesky: nonpositive pivot at index " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / ljj;
    }
  }
}

void CholeskyFactor::solve(std::span<const double> b, std::span<double> x) const {
  const int n = l_.n;
  // forward: L y = b
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l_(i, k) * x[k];
    x[i] = s / l_(i, i);
  }
  // backward: L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= l_(k, i) * x[k];
    x[i] = s / l_(i, i);
  }
}

SymmetricEigenFactor::SymmetricEigenFactor(DenseMatrix a, double rel_cutoff) : v_(a.n) {
  const int n = a.n;
  lambda_.resize(n);
  inv_lambda_.resize(n);
  for (int i = 0; i < n; ++i) v_(i, i) = 1.0;
  if (n == 0) return;

  // Cyclic Jacobi sweeps until off-diagonal mass is negligible.
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    double diag = 0.0;
    for (int p = 0; p < n; ++p) diag += a(p, p) * a(p, p);
    if (off <= 1e-30 * (diag + 1e-300)) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v_(k, p), vkq = v_(k, q);
          v_(k, p) = c * vkp - s * vkq;
          v_(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  double lmax = 0.0;
  for (int i = 0; i < n; ++i) {
    lambda_[i] = a(i, i);
    lmax = std::max(lmax, std::abs(lambda_[i]));
  }
  const double cut = rel_cutoff * (lmax > 0.0 ? lmax : 1.0);
  for (int i = 0; i < n; ++i) inv_lambda_[i] = std::abs(lambda_[i]) > cut ? 1.0 / lambda_[i] : 0.0;
}

void SymmetricEigenFactor::solve(std::span<const double> b, std::span<double> x) const {
  const int n = v_.n;
  std::vector<double> y(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v_(i, j) * b[i];
    y[j] = s * inv_lambda_[j];
  }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += v_(i, j) * y[j];
    x[i] = s;
  }
}

}  // namespace cardio
