#pragma once

// Scalar-generic building blocks shared by the discrete mechanics, the
// transcriptions and the baselines. Each kernel evaluated at scalar T calls
// the model callbacks at Dual<T> or Dual<Dual<T>>, so the depth budget of
// DeepSmoothMap bounds how far a kernel can itself be differentiated.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dmoc/diff/dense.hpp"
#include "dmoc/diff/derivatives.hpp"
#include "dmoc/diff/dual.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/model/lagrangian_system.hpp"

namespace dmoc::kernels {

using diff::DenseMatrix;
using diff::Dual;
using diff::value_of;

template <class T>
using CSpan = std::span<const T>;

template <class T>
std::vector<T> concat(CSpan<T> a, CSpan<T> b) {
  std::vector<T> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <class T>
std::vector<T> concat(CSpan<T> a, CSpan<T> b, CSpan<T> c) {
  std::vector<T> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

template <class T, class S>
std::vector<T> lift(CSpan<S> x) {
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = T(x[i]);
  return out;
}

template <class T>
std::vector<double> values(CSpan<T> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = value_of(x[i]);
  return out;
}

template <class T>
T lagrangian(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd) {
  return sys.L(std::span<const T>(concat(q, qd)))[0];
}

template <class T>
std::vector<T> force(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd, CSpan<T> u) {
  return sys.fL(std::span<const T>(concat(q, qd, u)));
}

/// ∂L/∂q̇ at (q, q̇); one dual sweep per velocity component.
template <class T>
std::vector<T> legendre(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd) {
  using DT = Dual<T>;
  auto qD = lift<DT>(q);
  return diff::gradient_t<T>([&](CSpan<DT> v) { return lagrangian<DT>(sys, CSpan<DT>(qD), v); }, qd);
}

/// ∂L/∂q at (q, q̇).
template <class T>
std::vector<T> lagrangian_dq(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd) {
  using DT = Dual<T>;
  auto vD = lift<DT>(qd);
  return diff::gradient_t<T>([&](CSpan<DT> x) { return lagrangian<DT>(sys, x, CSpan<DT>(vD)); }, q);
}

/// ∂²L/∂q̇².
template <class T>
DenseMatrix<T> mass_matrix(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd) {
  using DT = Dual<T>;
  auto qD = lift<DT>(q);
  return diff::jacobian_t<T>([&](CSpan<DT> v) { return legendre<DT>(sys, CSpan<DT>(qD), v); }, qd);
}

/// Directional derivative of ∂L/∂q̇ along (dq, dv).
template <class T>
std::vector<T> legendre_directional(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd, CSpan<T> dq,
                                    CSpan<T> dv) {
  using DT = Dual<T>;
  std::vector<DT> qs = diff::seeded<T>(q, dq);
  std::vector<DT> vs = diff::seeded<T>(qd, dv);
  std::vector<DT> p = legendre<DT>(sys, CSpan<DT>(qs), CSpan<DT>(vs));
  std::vector<T> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].deriv;
  return out;
}

/// ∂L/∂q − d/dt ∂L/∂q̇ + f_L with d/dt expanded along (q̇, q̈).
template <class T>
std::vector<T> el_residual(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd, CSpan<T> qdd, CSpan<T> u) {
  std::vector<T> Lq = lagrangian_dq<T>(sys, q, qd);
  std::vector<T> dp = legendre_directional<T>(sys, q, qd, qd, qdd);
  std::vector<T> f = force<T>(sys, q, qd, u);
  for (std::size_t i = 0; i < Lq.size(); ++i) Lq[i] = Lq[i] - dp[i] + f[i];
  return Lq;
}

/// q̈ from M q̈ = ∂L/∂q + f_L − (∂²L/∂q̇∂q) q̇.
template <class T>
std::vector<T> acceleration(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd, CSpan<T> u) {
  std::vector<T> zero(qd.size(), T(0.0));
  std::vector<T> rhs = el_residual<T>(sys, q, qd, CSpan<T>(zero), u);
  return diff::dense_solve(mass_matrix<T>(sys, q, qd), std::move(rhs));
}

/// Inverse Legendre transform. A double Newton loop from q̇ = 0 converges the
/// value; depth(T) further Newton steps in T arithmetic make every
/// derivative channel exact.
template <class T>
std::vector<T> legendre_inverse(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> p, double tol = 1e-12,
                                int max_iter = 50) {
  const std::size_t n = q.size();
  std::vector<double> q0 = values<T>(q);
  std::vector<double> p0 = values<T>(p);
  double scale = 1.0;
  for (double v : p0) scale = std::max(scale, std::fabs(v));
  std::vector<double> v(n, 0.0);
  bool converged = false;
  for (int it = 0; it <= max_iter; ++it) {
    std::vector<double> r = legendre<double>(sys, CSpan<double>(q0), CSpan<double>(v));
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] -= p0[i];
      if (!std::isfinite(r[i])) throw NonFiniteError("legendre_inverse: non-finite residual");
      res = std::max(res, std::fabs(r[i]));
    }
    if (res <= tol * scale) {
      converged = true;
      break;
    }
    if (it == max_iter) break;
    std::vector<double> dv = diff::dense_solve(mass_matrix<double>(sys, CSpan<double>(q0), CSpan<double>(v)), r);
    for (std::size_t i = 0; i < n; ++i) v[i] -= dv[i];
  }
  if (!converged) {
    throw ConvergenceError("legendre_inverse: Newton did not converge in " + std::to_string(max_iter) +
                           " iterations");
  }
  std::vector<T> vt = lift<T, double>(CSpan<double>(v));
  for (int k = 0; k < diff::depth_v<T>; ++k) {
    std::vector<T> r = legendre<T>(sys, q, CSpan<T>(vt));
    for (std::size_t i = 0; i < n; ++i) r[i] -= p[i];
    std::vector<T> dv = diff::dense_solve(mass_matrix<T>(sys, q, CSpan<T>(vt)), std::move(r));
    for (std::size_t i = 0; i < n; ++i) vt[i] -= dv[i];
  }
  return vt;
}

template <class T>
T hamiltonian(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> qd) {
  std::vector<T> p = legendre<T>(sys, q, qd);
  T h = -lagrangian<T>(sys, q, qd);
  for (std::size_t i = 0; i < p.size(); ++i) h += p[i] * qd[i];
  return h;
}

/// Generator ξ_Q(q).
template <class T>
std::vector<T> generator(const LagrangianSystem& sys, int index, CSpan<T> q) {
  if (index < 0 || index >= static_cast<int>(sys.symmetry_generators.size())) {
    throw std::out_of_range("symmetry generator " + std::to_string(index) + " not registered for system '" +
                            sys.name + "'");
  }
  return sys.symmetry_generators[static_cast<std::size_t>(index)](q);
}

}  // namespace dmoc::kernels
