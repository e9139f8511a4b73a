#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dmoc/diff/dual.hpp"
#include "dmoc/errors.hpp"

namespace dmoc::diff {

/// Small row-major matrix over any scalar type; used inside kernels that
/// must stay differentiable (Eigen is reserved for plain doubles).
template <class T>
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0.0)) {}

  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// Solves A x = b by Gaussian elimination with partial pivoting on the value channel.
template <class T>
std::vector<T> dense_solve(DenseMatrix<T> A, std::vector<T> b) {
  const int n = A.rows;
  if (A.cols != n || static_cast<int>(b.size()) != n) throw DimensionError("dense_solve: shape mismatch");
  double scale = 0.0;
  for (const T& v : A.a) scale = std::max(scale, std::fabs(value_of(v)));
  if (scale == 0.0 && n > 0) throw SingularMatrixError("dense_solve: zero matrix");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(value_of(A(k, k)));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(value_of(A(i, k)));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > 1e-14 * scale)) {
      throw SingularMatrixError("dense_solve: singular matrix (pivot " + std::to_string(best) + ")");
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = A(i, k) / A(k, k);
      if (value_of(f) == 0.0 && !is_dual_v<T>) continue;
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<T> x(n);
  for (int i = n - 1; i >= 0; --i) {
    T s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

}  // namespace dmoc::diff
