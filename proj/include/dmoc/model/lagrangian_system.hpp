#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmoc/diff/smooth_map.hpp"

namespace dmoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A forced mechanical system on R^n with controls in R^m.
///
/// L takes the concatenation (q, q̇); f_L takes (q, q̇, u) and returns a
/// generalized force. Symmetry generators map q to an infinitesimal
/// generator ξ_Q(q) ∈ R^n.
struct LagrangianSystem {
  std::string name;
  int n = 0;
  int m = 0;
  diff::DeepSmoothMap L;
  diff::DeepSmoothMap fL;
  std::vector<diff::DeepSmoothMap> symmetry_generators;
  std::vector<std::string> q_labels;
  std::vector<std::string> u_labels;

  /// Throws DimensionError if callback shapes disagree with n and m.
  void validate() const;
};

struct State {
  Vec q;
  Vec qdot;
};

/// ∂L/∂q̇.
Vec legendre(const LagrangianSystem& sys, const Vec& q, const Vec& qdot);

/// Solves legendre(sys, q, q̇) = p for q̇ by Newton from q̇ = 0.
Vec legendre_inverse(const LagrangianSystem& sys, const Vec& q, const Vec& p);

/// ∂L/∂q − d/dt ∂L/∂q̇ + f_L, with the time derivative expanded exactly.
Vec forced_el_residual(const LagrangianSystem& sys, const Vec& q, const Vec& qdot, const Vec& qddot, const Vec& u);

/// ⟨∂L/∂q̇, ξ_Q(q)⟩ for the given generator.
double momentum_map(const LagrangianSystem& sys, const Vec& q, const Vec& qdot, int generator);

/// ⟨∂L/∂q̇, q̇⟩ − L.
double hamiltonian(const LagrangianSystem& sys, const Vec& q, const Vec& qdot);

/// ∂²L/∂q̇².
Mat mass_matrix(const LagrangianSystem& sys, const Vec& q, const Vec& qdot);

/// q̈ solving the forced Euler-Lagrange equations.
Vec acceleration(const LagrangianSystem& sys, const Vec& q, const Vec& qdot, const Vec& u);

/// ξ_Q(q) for the given generator.
Vec generator_field(const LagrangianSystem& sys, const Vec& q, int generator);

}  // namespace dmoc
