#pragma once

#include <span>
#include <vector>

#include "dmoc/model/kernels.hpp"

namespace dmoc::kernels {

/// Midpoint state of a step: Q = (q0+q1)/2, V = (q1−q0)/h.
template <class T>
void midpoint(CSpan<T> q0, CSpan<T> q1, double h, std::vector<T>& Q, std::vector<T>& V) {
  Q.resize(q0.size());
  V.resize(q0.size());
  for (std::size_t i = 0; i < q0.size(); ++i) {
    Q[i] = 0.5 * (q0[i] + q1[i]);
    V[i] = (q1[i] - q0[i]) / h;
  }
}

/// h·L(Q, V).
template <class T>
T discrete_lagrangian(const LagrangianSystem& sys, CSpan<T> q0, CSpan<T> q1, double h) {
  std::vector<T> Q, V;
  midpoint<T>(q0, q1, h, Q, V);
  return h * lagrangian<T>(sys, CSpan<T>(Q), CSpan<T>(V));
}

/// (h/2)·f_L(Q, V, u); the left and right forces coincide for the midpoint rule.
template <class T>
std::vector<T> discrete_force(const LagrangianSystem& sys, CSpan<T> q0, CSpan<T> q1, CSpan<T> u, double h) {
  std::vector<T> Q, V;
  midpoint<T>(q0, q1, h, Q, V);
  std::vector<T> f = force<T>(sys, CSpan<T>(Q), CSpan<T>(V), u);
  for (auto& v : f) v = (0.5 * h) * v;
  return f;
}

/// (D1 L_d, D2 L_d) from one gradient of L_d over (q0, q1).
template <class T>
void discrete_lagrangian_slots(const LagrangianSystem& sys, CSpan<T> q0, CSpan<T> q1, double h, std::vector<T>& d1,
                               std::vector<T>& d2) {
  using DT = Dual<T>;
  const std::size_t n = q0.size();
  std::vector<T> x = concat(q0, q1);
  std::vector<T> g = diff::gradient_t<T>(
      [&](CSpan<DT> z) { return discrete_lagrangian<DT>(sys, z.subspan(0, n), z.subspan(n, n), h); }, CSpan<T>(x));
  d1.assign(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n));
  d2.assign(g.begin() + static_cast<std::ptrdiff_t>(n), g.end());
}

/// Minus-side forced discrete Legendre transform −D1 L_d − f⁻.
template <class T>
std::vector<T> dlegendre_minus(const LagrangianSystem& sys, CSpan<T> q0, CSpan<T> q1, CSpan<T> u, double h) {
  std::vector<T> d1, d2;
  discrete_lagrangian_slots<T>(sys, q0, q1, h, d1, d2);
  std::vector<T> f = discrete_force<T>(sys, q0, q1, u, h);
  for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = -d1[i] - f[i];
  return d1;
}

/// Plus-side forced discrete Legendre transform D2 L_d + f⁺.
template <class T>
std::vector<T> dlegendre_plus(const LagrangianSystem& sys, CSpan<T> q0, CSpan<T> q1, CSpan<T> u, double h) {
  std::vector<T> d1, d2;
  discrete_lagrangian_slots<T>(sys, q0, q1, h, d1, d2);
  std::vector<T> f = discrete_force<T>(sys, q0, q1, u, h);
  for (std::size_t i = 0; i < d2.size(); ++i) d2[i] = d2[i] + f[i];
  return d2;
}

/// Both step contributions to neighbouring node rows:
/// left = D1 L_d + f⁻ (row of q0), right = D2 L_d + f⁺ (row of q1).
template <class T>
void step_contributions(const LagrangianSystem& sys, CSpan<T> q0, CSpan<T> q1, CSpan<T> u, double h,
                        std::vector<T>& left, std::vector<T>& right) {
  discrete_lagrangian_slots<T>(sys, q0, q1, h, left, right);
  std::vector<T> f = discrete_force<T>(sys, q0, q1, u, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    left[i] += f[i];
    right[i] += f[i];
  }
}

/// D2 L_d(q_prev, q) + f⁺ + D1 L_d(q, q_next) + f⁻.
template <class T>
std::vector<T> del_residual(const LagrangianSystem& sys, CSpan<T> q_prev, CSpan<T> q, CSpan<T> q_next,
                            CSpan<T> u_prev, CSpan<T> u, double h) {
  std::vector<T> l0, r0, l1, r1;
  step_contributions<T>(sys, q_prev, q, u_prev, h, l0, r0);
  step_contributions<T>(sys, q, q_next, u, h, l1, r1);
  for (std::size_t i = 0; i < r0.size(); ++i) r0[i] += l1[i];
  return r0;
}

}  // namespace dmoc::kernels
