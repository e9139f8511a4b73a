#pragma once

#include <string>

#include "dmoc/ocp/ocp.hpp"

namespace dmoc {

/// Hamiltonian view of a regular Lagrangian system. H and f_H are evaluated
/// through a numerical inverse Legendre transform.
struct HamiltonianForm {
  diff::DeepSmoothMap H;   ///< (q, p) -> R
  diff::DeepSmoothMap fH;  ///< (q, p, u) -> R^n, f_H(q, p, u) = f_L(q, v(q, p), u)
};

HamiltonianForm hamiltonian_form(const LagrangianSystem& sys);

/// Implicit midpoint collocation on (q, p). Variables [q_0..q_N, p_0..p_N,
/// u_0..u_{N−1}]; rows q0, p0, two blocks of n per interval, pN, qN.
Nlp transcribe_hamiltonian_midpoint(const Ocp& ocp);

/// Implicit midpoint collocation on (q, v) with v̇ from the mass-matrix solve.
/// Variables [q_0..q_N, v_0..v_N, u_0..u_{N−1}]; rows q0, v0, intervals, vN, qN.
Nlp transcribe_velocity_midpoint(const Ocp& ocp);

/// Registered transcription methods.
const std::vector<std::string>& method_names();

/// Dispatch by name: "dmoc", "dmoc-mayer", "ham-midpoint", "vel-midpoint".
Nlp transcribe_method(const Ocp& ocp, const std::string& method);

struct SolutionGap {
  double state_gap = 0.0;         ///< max over nodes of ‖(q, q̇)_a − (q, q̇)_b‖∞
  double configuration_gap = 0.0;  ///< max over nodes of ‖q_a − q_b‖∞
  double velocity_gap = 0.0;
  double control_gap = 0.0;
  double objective_gap = 0.0;
};

/// Node-aligned comparison of two solved transcriptions of the same problem.
SolutionGap compare_solutions(const Nlp& a, const Eigen::VectorXd& xa, const Nlp& b, const Eigen::VectorXd& xb);

}  // namespace dmoc
