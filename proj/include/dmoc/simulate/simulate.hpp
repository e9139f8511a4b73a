#pragma once

#include <vector>

#include "dmoc/discmech/discmech.hpp"

namespace dmoc {

struct RolloutResult {
  DiscreteTrajectory trajectory;
  std::vector<Vec> momenta;      ///< node momenta from the discrete Legendre transforms
  std::vector<double> energies;  ///< H(q_k, v(q_k, p_k))
};

struct NewtonOptions {
  double tol = 1e-10;  ///< on ‖residual‖∞ / max(1, ‖p‖∞)
  int max_iter = 50;
};

/// q_{k+1} from p_k + D1 L_d(q_k, q_{k+1}) + f⁻ = 0, Newton from `guess`.
Vec solve_forward(const LagrangianSystem& sys, const Vec& q, const Vec& p, const Vec& u_mid, double h,
                  const Vec& guess, const NewtonOptions& opts = {});

/// q1 matching the continuous initial momentum ∂L/∂q̇(q0, q̇0); Newton from q0 + h·q̇0.
Vec initial_step(const LagrangianSystem& sys, const Vec& q0, const Vec& qdot0, const Vec& u_mid, double h,
                 const NewtonOptions& opts = {});

/// q_{k+1} solving the forced DEL equations at q_k; Newton from 2q_k − q_{k−1}.
Vec del_step(const LagrangianSystem& sys, const Vec& q_prev, const Vec& q, const Vec& u_prev, const Vec& u, double h,
             const NewtonOptions& opts = {});

/// initial_step followed by N−1 del_steps.
RolloutResult rollout(const LagrangianSystem& sys, const Vec& q0, const Vec& qdot0, const std::vector<Vec>& controls,
                      double h, int N, const NewtonOptions& opts = {});

struct EnergyStats {
  double max_deviation = 0.0;  ///< max_k |E_k − E_0|
  double slope = 0.0;          ///< least-squares slope of E_k against k
};

EnergyStats energy_series(const RolloutResult& result);

}  // namespace dmoc
