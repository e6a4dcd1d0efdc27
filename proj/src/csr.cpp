#include "cardio/csr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cardio {

double CsrMatrix::at(index_t i, index_t j) const {
  const auto begin = col_idx.begin() + row_ptr[i];
  const auto end = col_idx.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it != end && *it == j) return vals[static_cast<std::size_t>(it - col_idx.begin())];
  return 0.0;
}

void CsrMatrix::validate() const {
  if (static_cast<index_t>(row_ptr.size()) != n_rows + 1)
    throw std::invalid_argument("csr: row_ptr size mismatch");
  if (row_ptr.front() != 0) throw std::invalid_argument("csr: row_ptr[0] != 0");
  if (row_ptr.back() != nnz()) throw std::invalid_argument("csr: row_ptr[n] != nnz");
  for (index_t i = 0; i < n_rows; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw std::invalid_argument("csr: row_ptr not nondecreasing");
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= n_cols)
        throw std::invalid_argument("csr: column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        throw std::invalid_argument("csr: columns not strictly increasing in row " +
                                    std::to_string(i));
    }
  }
}

CsrMatrix CsrMatrix::identity(index_t n) {
  CsrMatrix a;
  a.n_rows = a.n_cols = n;
  a.row_ptr.resize(n + 1);
  a.col_idx.resize(n);
  a.vals.assign(n, 1.0);
  for (index_t i = 0; i <= n; ++i) a.row_ptr[i] = i;
  std::iota(a.col_idx.begin(), a.col_idx.end(), 0);
  return a;
}

CsrMatrix CsrMatrix::zero(index_t n_rows, index_t n_cols) {
  CsrMatrix a;
  a.n_rows = n_rows;
  a.n_cols = n_cols;
  a.row_ptr.assign(n_rows + 1, 0);
  return a;
}

CsrMatrix TripletBuilder::build() const {
  const std::size_t nt = vals_.size();
  // Sort triplet positions by (row, col) with a stable permutation so that
  // duplicates are summed in insertion order.
  std::vector<std::size_t> perm(nt);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (rows_[a] != rows_[b]) return rows_[a] < rows_[b];
    return cols_[a] < cols_[b];
  });

  CsrMatrix a;
  a.n_rows = n_rows_;
  a.n_cols = n_cols_;
  a.row_ptr.assign(n_rows_ + 1, 0);
  a.col_idx.reserve(nt);
  a.vals.reserve(nt);

  index_t prev_row = -1;
  index_t prev_col = -1;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t k = perm[t];
    const index_t i = rows_[k];
    const index_t j = cols_[k];
    if (i < 0 || i >= n_rows_ || j < 0 || j >= n_cols_)
      throw std::invalid_argument("triplet out of range");
    if (i == prev_row && j == prev_col) {
      a.vals.back() += vals_[k];
    } else {
      a.col_idx.push_back(j);
      a.vals.push_back(vals_[k]);
      a.row_ptr[i + 1] += 1;
      prev_row = i;
      prev_col = j;
    }
  }
  for (index_t i = 0; i < n_rows_; ++i) a.row_ptr[i + 1] += a.row_ptr[i];
  return a;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<index_t>(x.size()) != a.n_cols || static_cast<index_t>(y.size()) != a.n_rows)
    throw std::invalid_argument("spmv: dimension mismatch");
  for (index_t i = 0; i < a.n_rows; ++i) {
    double s = 0.0;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.vals[k] * x[a.col_idx[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n_rows);
  spmv(a, x, y);
  return y;
}

void spmv_transpose(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<index_t>(x.size()) != a.n_rows || static_cast<index_t>(y.size()) != a.n_cols)
    throw std::invalid_argument("spmv_transpose: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (index_t i = 0; i < a.n_rows; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      y[a.col_idx[k]] += a.vals[k] * x[i];
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.n_rows = a.n_cols;
  t.n_cols = a.n_rows;
  t.row_ptr.assign(t.n_rows + 1, 0);
  t.col_idx.resize(a.vals.size());
  t.vals.resize(a.vals.size());
  for (index_t j : a.col_idx) t.row_ptr[j + 1] += 1;
  for (index_t i = 0; i < t.n_rows; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  std::vector<std::int64_t> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (index_t i = 0; i < a.n_rows; ++i) {
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const std::int64_t pos = fill[a.col_idx[k]]++;
      t.col_idx[pos] = i;       // rows of a visited in order -> sorted columns
      t.vals[pos] = a.vals[k];
    }
  }
  return t;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.n_cols != b.n_rows) throw std::invalid_argument("multiply: dimension mismatch");
  CsrMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = b.n_cols;
  c.row_ptr.assign(a.n_rows + 1, 0);

  std::vector<double> acc(b.n_cols, 0.0);
  std::vector<index_t> marked;
  marked.reserve(64);
  std::vector<char> mark(b.n_cols, 0);

  for (index_t i = 0; i < a.n_rows; ++i) {
    marked.clear();
    for (std::int64_t ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
      const index_t k = a.col_idx[ka];
      const double av = a.vals[ka];
      for (std::int64_t kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
        const index_t j = b.col_idx[kb];
        if (!mark[j]) {
          mark[j] = 1;
          marked.push_back(j);
          acc[j] = 0.0;
        }
        acc[j] += av * b.vals[kb];
      }
    }
    std::sort(marked.begin(), marked.end());
    for (index_t j : marked) {
      c.col_idx.push_back(j);
      c.vals.push_back(acc[j]);
      mark[j] = 0;
    }
    c.row_ptr[i + 1] = static_cast<std::int64_t>(c.col_idx.size());
  }
  return c;
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
    throw std::invalid_argument("add: dimension mismatch");
  CsrMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = a.n_cols;
  c.row_ptr.assign(a.n_rows + 1, 0);
  for (index_t i = 0; i < a.n_rows; ++i) {
    std::int64_t ka = a.row_ptr[i], kb = b.row_ptr[i];
    while (ka < a.row_ptr[i + 1] || kb < b.row_ptr[i + 1]) {
      index_t ja = ka < a.row_ptr[i + 1] ? a.col_idx[ka] : a.n_cols;
      index_t jb = kb < b.row_ptr[i + 1] ? b.col_idx[kb] : b.n_cols;
      if (ja == jb) {
        c.col_idx.push_back(ja);
        c.vals.push_back(alpha * a.vals[ka] + beta * b.vals[kb]);
        ++ka;
        ++kb;
      } else if (ja < jb) {
        c.col_idx.push_back(ja);
        c.vals.push_back(alpha * a.vals[ka]);
        ++ka;
      } else {
        c.col_idx.push_back(jb);
        c.vals.push_back(beta * b.vals[kb]);
        ++kb;
      }
    }
    c.row_ptr[i + 1] = static_cast<std::int64_t>(c.col_idx.size());
  }
  return c;
}

std::vector<double> diagonal(const CsrMatrix& a) {
  std::vector<double> d(a.n_rows, 0.0);
  for (index_t i = 0; i < a.n_rows; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col_idx[k] == i) d[i] = a.vals[k];
  return d;
}

double max_abs(const CsrMatrix& a) {
  double m = 0.0;
  for (double v : a.vals) m = std::max(m, std::abs(v));
  return m;
}

double symmetry_gap(const CsrMatrix& a) {
  const CsrMatrix d = add(a, transpose(a), 1.0, -1.0);
  return max_abs(d);
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n_rows << " " << a.n_cols << " " << a.nnz() << "\n";
  char buf[64];
  for (index_t i = 0; i < a.n_rows; ++i) {
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, a.col_idx[k] + 1, a.vals[k]);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  bool symmetric = false;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty file " + path);
  if (line.rfind("%%MatrixMarket", 0) == 0) {
    std::string lower = line;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower.find("coordinate") == std::string::npos)
      throw std::runtime_error("matrix market: only coordinate format supported");
    symmetric = lower.find("symmetric") != std::string::npos;
    while (std::getline(in, line) && !line.empty() && line[0] == '%') {
    }
  }
  std::istringstream header(line);
  long nr = 0, nc = 0, nz = 0;
  if (!(header >> nr >> nc >> nz)) throw std::runtime_error("matrix market: bad size line");
  TripletBuilder builder(static_cast<index_t>(nr), static_cast<index_t>(nc));
  builder.reserve(static_cast<std::size_t>(symmetric ? 2 * nz : nz));
  for (long t = 0; t < nz; ++t) {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error("matrix market: truncated entry list");
    builder.add(static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v);
    if (symmetric && i != j) builder.add(static_cast<index_t>(j - 1), static_cast<index_t>(i - 1), v);
  }
  return builder.build();
}

}  // namespace cardio
