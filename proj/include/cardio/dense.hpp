#pragma once

#include <span>
#include <vector>

#include "cardio/csr.hpp"

namespace cardio {

/// Column-major square dense matrix of modest size (coarse grids, Jacobi
/// blocks). Not meant for large n.
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // column-major, n*n

  DenseMatrix() = default;
  explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(j) * n + i]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * n + i]; }

  static DenseMatrix from_csr(const CsrMatrix& m);
};

/// Cholesky factorization A = L L^T of an SPD matrix. Throws
/// std::runtime_error when a pivot is not strictly positive.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(DenseMatrix a);
  void solve(std::span<const double> b, std::span<double> x) const;
  int size() const { return l_.n; }

 private:
  DenseMatrix l_;
};

/// Spectral factorization A = V diag(lambda) V^T of a symmetric matrix by
/// cyclic Jacobi rotations. solve() applies the pseudoinverse with a relative
/// eigenvalue cutoff, which handles the semidefinite elliptic coarse operator
/// as well as definite ones.
class SymmetricEigenFactor {
 public:
  explicit SymmetricEigenFactor(DenseMatrix a, double rel_cutoff = 1e-12);
  void solve(std::span<const double> b, std::span<double> x) const;
  int size() const { return v_.n; }
  const std::vector<double>& eigenvalues() const { return lambda_; }

 private:
  DenseMatrix v_;
  std::vector<double> lambda_;
  std::vector<double> inv_lambda_;
};

}  // namespace cardio
