#pragma once

#include <vector>

#include "dmoc/model/kernels.hpp"

namespace dmoc::kernels {

/// H(q, p) = ⟨p, q̇⟩ − L(q, q̇) with q̇ from the inverse Legendre transform.
template <class T>
T hamiltonian_qp(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> p) {
  std::vector<T> v = legendre_inverse<T>(sys, q, p);
  T H = -lagrangian<T>(sys, q, CSpan<T>(v));
  for (std::size_t i = 0; i < v.size(); ++i) H += p[i] * v[i];
  return H;
}

/// Forced Hamiltonian vector field written through the Lagrangian:
/// q̇ = ∂H/∂p = v(q, p), ṗ = −∂H/∂q + f_H = ∂L/∂q(q, v) + f_L(q, v, u).
/// Avoids differentiating through the Legendre inversion a second time.
template <class T>
void hamiltonian_field(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> p, CSpan<T> u, std::vector<T>& qdot,
                       std::vector<T>& pdot) {
  qdot = legendre_inverse<T>(sys, q, p);
  pdot = lagrangian_dq<T>(sys, q, CSpan<T>(qdot));
  std::vector<T> f = force<T>(sys, q, CSpan<T>(qdot), u);
  for (std::size_t i = 0; i < pdot.size(); ++i) pdot[i] += f[i];
}

/// First-order tangent-space field: q̇ = v, v̇ = a(q, v, u).
template <class T>
void velocity_field(const LagrangianSystem& sys, CSpan<T> q, CSpan<T> v, CSpan<T> u, std::vector<T>& qdot,
                    std::vector<T>& vdot) {
  qdot.assign(v.begin(), v.end());
  vdot = acceleration<T>(sys, q, v, u);
}

}  // namespace dmoc::kernels
