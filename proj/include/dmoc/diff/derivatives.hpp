#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmoc/diff/dense.hpp"
#include "dmoc/diff/dual.hpp"
#include "dmoc/diff/smooth_map.hpp"

namespace dmoc::diff {

// ---------------------------------------------------------------------------
// Generic helpers over a scalar type T. The callable receives a span of
// Dual<T> and returns Dual<T> (scalar) or std::vector<Dual<T>>.
// ---------------------------------------------------------------------------

template <class T>
std::vector<Dual<T>> seeded(std::span<const T> x, std::span<const T> dir) {
  std::vector<Dual<T>> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = Dual<T>(x[i], dir[i]);
  return out;
}

template <class T>
std::vector<Dual<T>> seeded_unit(std::span<const T> x, std::size_t k) {
  std::vector<Dual<T>> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = Dual<T>(x[i], T(i == k ? 1.0 : 0.0));
  return out;
}

/// Gradient of a scalar callable in T arithmetic (one sweep per input).
template <class T, class F>
std::vector<T> gradient_t(F&& f, std::span<const T> x) {
  std::vector<T> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto xs = seeded_unit<T>(x, k);
    Dual<T> y = f(std::span<const Dual<T>>(xs));
    g[k] = y.deriv;
  }
  return g;
}

/// Jacobian of a vector callable in T arithmetic, m x n. The value is
/// written to `value` when given.
template <class T, class F>
DenseMatrix<T> jacobian_t(F&& f, std::span<const T> x, std::vector<T>* value = nullptr) {
  DenseMatrix<T> J;
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto xs = seeded_unit<T>(x, k);
    std::vector<Dual<T>> y = f(std::span<const Dual<T>>(xs));
    if (k == 0) {
      J = DenseMatrix<T>(static_cast<int>(y.size()), static_cast<int>(x.size()));
      if (value) {
        value->resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) (*value)[i] = y[i].value;
      }
    }
    for (std::size_t i = 0; i < y.size(); ++i) J(static_cast<int>(i), static_cast<int>(k)) = y[i].deriv;
  }
  return J;
}

/// Value and derivative of a callable along direction dir.
template <class T, class F>
auto directional_t(F&& f, std::span<const T> x, std::span<const T> dir) {
  auto xs = seeded<T>(x, dir);
  return f(std::span<const Dual<T>>(xs));
}

// ---------------------------------------------------------------------------
// Derivatives of SmoothMaps at real points.
// ---------------------------------------------------------------------------

/// ∇f(x)·v from one dual sweep seeded with v.
double directional_derivative(const SmoothMap& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

Eigen::VectorXd gradient(const SmoothMap& f, const Eigen::VectorXd& x);

/// Output-dim by input-dim Jacobian, column j from the sweep seeded with e_j.
Eigen::MatrixXd jacobian(const SmoothMap& F, const Eigen::VectorXd& x);

/// Exactly symmetric Hessian of a scalar map from nested dual sweeps.
Eigen::MatrixXd hessian(const SmoothMap& f, const Eigen::VectorXd& x);

/// Σ_i w_i ∇²F_i(x) for a vector-valued map.
Eigen::MatrixXd weighted_hessian(const SmoothMap& F, const Eigen::VectorXd& x, const Eigen::VectorXd& w);

/// Plain evaluation with finiteness check.
Eigen::VectorXd evaluate(const SmoothMap& F, const Eigen::VectorXd& x);

struct FdReport {
  bool pass = false;
  double max_rel_deviation = 0.0;
  int worst_row = -1;
  int worst_col = -1;
  double ad_value = 0.0;
  double fd_value = 0.0;
  double step = 0.0;
  std::string note;  ///< set when an evaluation failed
};

/// Compares jacobian(F, x) against central differences with step
/// cbrt(eps)·max(1, ‖x‖∞). Deviation per entry is |ad − fd| / max(1, |ad|, |fd|).
FdReport fd_check(const SmoothMap& F, const Eigen::VectorXd& x, double tolerance);

}  // namespace dmoc::diff
