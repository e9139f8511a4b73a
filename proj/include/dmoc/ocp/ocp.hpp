#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmoc/discmech/discmech.hpp"
#include "dmoc/model/lagrangian_system.hpp"
#include "dmoc/ocp/nlp.hpp"

namespace dmoc {

/// Fixed-horizon optimal control problem for a forced Lagrangian system.
struct Ocp {
  std::string name;
  LagrangianSystem sys;
  Vec q0, qdot0;
  Vec qT, qdotT;
  diff::DeepSmoothMap C;    ///< running cost (q, q̇, u) -> R
  diff::DeepSmoothMap Phi;  ///< optional Mayer term on the final configuration
  double T = 0.0;
  int N = 0;

  /// Optional replacement for the fixed final state: r(q_N, p_N) = 0, with
  /// p_N the plus-side discrete momentum of the last step.
  diff::DeepSmoothMap final_constraint;

  // Representable but not solvable here; transcription rejects them.
  diff::DeepSmoothMap path_constraints;  ///< h(q, q̇, u) >= 0
  std::optional<std::pair<Vec, Vec>> control_bounds;

  double h() const { return T / N; }
  /// Throws on T <= 0, N < 2 or inconsistent shapes.
  void validate() const;
};

/// Σ_k h·C(Q_k, V_k, u_k) + Φ(q_N) with midpoint Q, V.
double discrete_objective(const Ocp& ocp, const DiscreteTrajectory& traj);

/// Variables [q_0..q_N, u_0..u_{N−1}]; rows: initial configuration, node
/// momentum balances 0..N (DEL in the interior), final configuration.
Nlp transcribe(const Ocp& ocp);

/// transcribe plus accumulators z_0..z_N: z_0 = 0, z_{k+1} = z_k + C_d, objective z_N + Φ.
Nlp to_mayer(const Ocp& ocp);

/// Linear configuration interpolation and zero controls, packed for `nlp`.
Eigen::VectorXd initial_guess(const Nlp& nlp);

/// Packs node configurations q_0..q_N and controls u_0..u_{N−1} for any
/// transcription; momentum, velocity and accumulator blocks are derived from them.
Eigen::VectorXd pack_guess(const Nlp& nlp, const std::vector<Vec>& q, const std::vector<Vec>& u);

/// Same horizon on N intervals: configurations interpolated linearly in time,
/// controls linearly between interval midpoints.
DiscreteTrajectory resample(const DiscreteTrajectory& src, int N);

/// Node configurations and controls from a packed vector of any transcription.
DiscreteTrajectory decode_trajectory(const Nlp& nlp, const Eigen::VectorXd& x);

/// Per-node vectors of a node block ("q", "p", "v", "z").
std::vector<Vec> decode_nodes(const Nlp& nlp, const Eigen::VectorXd& x, const std::string& block);

/// Node momenta in the native form of the transcription: discrete Legendre
/// transforms (dmoc), the p variables (ham-midpoint), or ∂L/∂q̇(q, v) (vel-midpoint).
std::vector<Vec> native_momenta(const Nlp& nlp, const Eigen::VectorXd& x);

/// Node velocities: from momenta via the inverse Legendre transform (dmoc,
/// ham-midpoint) or the v variables (vel-midpoint).
std::vector<Vec> node_velocities(const Nlp& nlp, const Eigen::VectorXd& x);

/// Momentum balance of a solved transcription in its native variables.
NoetherAudit method_noether_audit(const Nlp& nlp, const Eigen::VectorXd& x, int generator);

struct AdjointExtract {
  std::vector<Vec> psi;           ///< costate (ψ^q, ψ^p) per node, k = 0..N
  std::vector<double> residuals;  ///< midpoint adjoint recursion residual, k = 1..N−1
  double max_residual = 0.0;
  double scale = 1.0;             ///< max(1, max_k ‖ψ_k‖∞)
};

/// Costates from the equality multipliers of the dynamic rows and the
/// residual of the midpoint adjoint recursion (ā = a = 1/2, b = 1).
AdjointExtract extract_adjoints(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

}  // namespace dmoc
