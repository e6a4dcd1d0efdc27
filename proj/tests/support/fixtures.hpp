#pragma once

// Canonical test operators shared by the AMG tests and the acceptance suite.

#include "cardio/csr.hpp"

namespace fixtures {

// 7-point finite-difference Laplacian on an n^3 grid with Dirichlet walls
// (SPD, diagonal 6).
inline cardio::CsrMatrix fd_laplacian_3d(int n) {
  using cardio::index_t;
  const index_t total = static_cast<index_t>(n) * n * n;
  cardio::TripletBuilder b(total, total);
  const auto id = [n](int i, int j, int k) {
    return static_cast<index_t>(i + n * (j + static_cast<std::int64_t>(n) * k));
  };
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const index_t row = id(i, j, k);
        b.add(row, row, 6.0);
        if (i > 0) b.add(row, id(i - 1, j, k), -1.0);
        if (i < n - 1) b.add(row, id(i + 1, j, k), -1.0);
        if (j > 0) b.add(row, id(i, j - 1, k), -1.0);
        if (j < n - 1) b.add(row, id(i, j + 1, k), -1.0);
        if (k > 0) b.add(row, id(i, j, k - 1), -1.0);
        if (k < n - 1) b.add(row, id(i, j, k + 1), -1.0);
      }
  return b.build();
}

// 5-point 2D variant.
inline cardio::CsrMatrix fd_laplacian_2d(int n) {
  using cardio::index_t;
  const index_t total = static_cast<index_t>(n) * n;
  cardio::TripletBuilder b(total, total);
  const auto id = [n](int i, int j) { return static_cast<index_t>(i + n * j); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const index_t row = id(i, j);
      b.add(row, row, 4.0);
      if (i > 0) b.add(row, id(i - 1, j), -1.0);
      if (i < n - 1) b.add(row, id(i + 1, j), -1.0);
      if (j > 0) b.add(row, id(i, j - 1), -1.0);
      if (j < n - 1) b.add(row, id(i, j + 1), -1.0);
    }
  return b.build();
}

// Dirichlet 1D Laplacian tridiag(-1, 2, -1).
inline cardio::CsrMatrix fd_laplacian_1d(int n) {
  cardio::TripletBuilder b(n, n);
  for (cardio::index_t i = 0; i < n; ++i) {
    b.add(i, i, 2.0);
    if (i > 0) b.add(i, i - 1, -1.0);
    if (i < n - 1) b.add(i, i + 1, -1.0);
  }
  return b.build();
}

}  // namespace fixtures
