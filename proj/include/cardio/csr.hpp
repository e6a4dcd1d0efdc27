#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardio {

using index_t = std::int32_t;

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row and row_ptr[0] == 0, row_ptr[n_rows] == nnz.
struct CsrMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<index_t> col_idx;
  std::vector<double> vals;

  std::int64_t nnz() const { return static_cast<std::int64_t>(vals.size()); }

  // Value lookup by binary search in the row; zero when the entry is absent.
  double at(index_t i, index_t j) const;

  // Checks the structural invariants above; throws std::invalid_argument.
  void validate() const;

  static CsrMatrix identity(index_t n);
  static CsrMatrix zero(index_t n_rows, index_t n_cols);
};

/// Duplicate-summing triplet accumulator; the standard path from FEM
/// assembly to CSR. Duplicates are summed in insertion order, so the result
/// is deterministic for a fixed insertion sequence.
class TripletBuilder {
 public:
  TripletBuilder(index_t n_rows, index_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

  void add(index_t i, index_t j, double v) {
    rows_.push_back(i);
    cols_.push_back(j);
    vals_.push_back(v);
  }

  void reserve(std::size_t n) {
    rows_.reserve(n);
    cols_.reserve(n);
    vals_.reserve(n);
  }

  CsrMatrix build() const;

 private:
  index_t n_rows_, n_cols_;
  std::vector<index_t> rows_, cols_;
  std::vector<double> vals_;
};

/// y = A x
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

/// y = A^T x without forming the transpose.
void spmv_transpose(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

CsrMatrix transpose(const CsrMatrix& a);

/// C = A B (Gustavson's algorithm, sorted output columns).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// C = alpha A + beta B over the union sparsity pattern.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);

std::vector<double> diagonal(const CsrMatrix& a);

double max_abs(const CsrMatrix& a);

/// max_ij |A - A^T| -- symmetry defect.
double symmetry_gap(const CsrMatrix& a);

// Matrix Market coordinate format (real). Import accepts "general" and
// "symmetric"; export writes "general".
void write_matrix_market(const CsrMatrix& a, const std::string& path);
CsrMatrix read_matrix_market(const std::string& path);

}  // namespace cardio
