#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "dmoc/model/lagrangian_system.hpp"

namespace dmoc {

/// One-stage symmetric scheme: the midpoint rule.
struct MidpointScheme {
  int stages = 1;
  double c = 0.5;  ///< control/quadrature node
  double b = 1.0;  ///< quadrature weight
  double a = 0.5;  ///< stage coefficient of the configuration update
  double a_bar = 0.5;  ///< stage coefficient of the momentum update

  /// b_i b_j − b_i ā_ij − b_j a_ji = 0 for all stage pairs.
  bool symplectic() const { return b * b - b * a_bar - b * a == 0.0; }
};

/// Node configurations q_0..q_N and one midpoint control per interval.
struct DiscreteTrajectory {
  double h = 0.0;
  int N = 0;
  std::vector<Vec> q;
  std::vector<Vec> u;

  /// Throws on non-positive h, N < 1, wrong sequence lengths or non-finite entries.
  void validate(const LagrangianSystem& sys) const;
};

struct StepForces {
  Vec f_minus;  ///< acts on q_k
  Vec f_plus;   ///< acts on q_{k+1}
};

enum class Side { minus, plus };

/// h·L((q0+q1)/2, (q1−q0)/h).
double discrete_lagrangian(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, double h);

StepForces discrete_forces(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& u_mid, double h);

/// Forced discrete Euler-Lagrange residual at the middle node q.
Vec del_residual(const LagrangianSystem& sys, const Vec& q_prev, const Vec& q, const Vec& q_next, const Vec& u_prev,
                 const Vec& u, double h);

/// minus: −D1 L_d − f⁻ (momentum at q0); plus: D2 L_d + f⁺ (momentum at q1).
Vec dlegendre(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& u_mid, double h, Side side);

/// dlegendre contracted with ξ_Q at q0 (minus) or q1 (plus).
double discrete_momentum(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& u_mid, double h,
                         int generator, Side side);

/// Node momenta of a trajectory: p_0 from the minus side of step 0, p_k
/// (k ≥ 1) from the plus side of step k−1.
std::vector<Vec> node_momenta(const LagrangianSystem& sys, const DiscreteTrajectory& traj);

struct NoetherAudit {
  std::vector<double> residuals;           ///< Δ_k, k = 0..N−1
  std::vector<double> momenta;             ///< p_k·ξ_Q(q_k), k = 0..N
  std::vector<double> forcing;             ///< f⁻·ξ_Q(q_k) + f⁺·ξ_Q(q_{k+1})
  std::vector<double> symmetry_breaking;   ///< D1 L_d·ξ_Q(q_k) + D2 L_d·ξ_Q(q_{k+1}); zero for invariant L_d
  double total = 0.0;                      ///< Σ Δ_k
  double max_abs = 0.0;
  double sum_abs = 0.0;
  double scale = 1.0;                      ///< max(1, max_k |p_k·ξ_Q|)
};

/// Discrete momentum balance per step: momentum change minus forcing minus
/// the symmetry-breaking part of L_d.
NoetherAudit noether_audit(const LagrangianSystem& sys, const DiscreteTrajectory& traj, int generator);

/// Balance for an arbitrary pair of node momenta and a midpoint velocity V.
/// With V = (q1−q0)/h and p from dlegendre this reproduces noether_audit.
double momentum_balance(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& p0, const Vec& p1,
                        const Vec& V, const Vec& u_mid, double h, int generator);

using ControlCurve = std::function<Vec(double t)>;

struct ConsistencyReport {
  std::vector<double> h;
  std::vector<double> lagrangian_error;   ///< |L_d − L_d^E|
  std::vector<double> force_minus_error;  ///< ‖f⁻ − f^{E−}‖∞
  std::vector<double> force_plus_error;   ///< ‖f⁺ − f^{E+}‖∞
  std::vector<double> force_sum_error;    ///< ‖(f⁻+f⁺) − (f^{E−}+f^{E+})‖∞
  double lagrangian_order = 0.0;
  double force_minus_order = 0.0;
  double force_plus_order = 0.0;
  double force_sum_order = 0.0;
  bool lagrangian_exact = false;
  bool force_minus_exact = false;
  bool force_plus_exact = false;
  bool force_sum_exact = false;
  double force_order() const { return std::min(force_minus_order, force_plus_order); }
};

/// Order of consistency of the midpoint L_d and f_d^± against the exact
/// discrete Lagrangian and forces along the flow from `initial` under the
/// control curve. Errors at round-off level are flagged exact and not fitted.
ConsistencyReport consistency_order(const LagrangianSystem& sys, const State& initial, const ControlCurve& control,
                                    const std::vector<double>& h_grid);

/// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace dmoc
