#include "dmoc/discmech/discmech.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dmoc/detail/convert.hpp"
#include "dmoc/discmech/kernels.hpp"

namespace dmoc {

namespace {

using detail::check_size;
using detail::to_eigen;
using detail::to_std;
using kernels::CSpan;

void check_h(double h, const char* what) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument(std::string(what) + ": step size must be positive");
}

void check_step(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, double h, const char* what) {
  check_h(h, what);
  check_size(q0, sys.n, what, "q0");
  check_size(q1, sys.n, what, "q1");
}

}  // namespace

void DiscreteTrajectory::validate(const LagrangianSystem& sys) const {
  check_h(h, "DiscreteTrajectory");
  if (N < 1) throw std::invalid_argument("DiscreteTrajectory: N must be at least 1");
  if (static_cast<int>(q.size()) != N + 1) throw DimensionError("DiscreteTrajectory: expected N+1 configurations");
  if (static_cast<int>(u.size()) != N) throw DimensionError("DiscreteTrajectory: expected N controls");
  for (const auto& qk : q) {
    check_size(qk, sys.n, "DiscreteTrajectory", "q_k");
    if (!qk.allFinite()) throw NonFiniteError("DiscreteTrajectory: non-finite configuration");
  }
  for (const auto& uk : u) {
    check_size(uk, sys.m, "DiscreteTrajectory", "u_k");
    if (!uk.allFinite()) throw NonFiniteError("DiscreteTrajectory: non-finite control");
  }
}

double discrete_lagrangian(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, double h) {
  check_step(sys, q0, q1, h, "discrete_lagrangian");
  auto a = to_std(q0), b = to_std(q1);
  double v = kernels::discrete_lagrangian<double>(sys, CSpan<double>(a), CSpan<double>(b), h);
  if (!std::isfinite(v)) throw NonFiniteError("discrete_lagrangian: non-finite output");
  return v;
}

StepForces discrete_forces(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& u_mid, double h) {
  check_step(sys, q0, q1, h, "discrete_forces");
  check_size(u_mid, sys.m, "discrete_forces", "u_mid");
  auto a = to_std(q0), b = to_std(q1), u = to_std(u_mid);
  Vec f = to_eigen(kernels::discrete_force<double>(sys, CSpan<double>(a), CSpan<double>(b), CSpan<double>(u), h),
                   "discrete_forces");
  return {f, f};
}

Vec del_residual(const LagrangianSystem& sys, const Vec& q_prev, const Vec& q, const Vec& q_next, const Vec& u_prev,
                 const Vec& u, double h) {
  check_step(sys, q_prev, q, h, "del_residual");
  check_size(q_next, sys.n, "del_residual", "q_next");
  check_size(u_prev, sys.m, "del_residual", "u_prev");
  check_size(u, sys.m, "del_residual", "u");
  auto a = to_std(q_prev), b = to_std(q), c = to_std(q_next), up = to_std(u_prev), uk = to_std(u);
  return to_eigen(kernels::del_residual<double>(sys, CSpan<double>(a), CSpan<double>(b), CSpan<double>(c),
                                                CSpan<double>(up), CSpan<double>(uk), h),
                  "del_residual");
}

Vec dlegendre(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& u_mid, double h, Side side) {
  check_step(sys, q0, q1, h, "dlegendre");
  check_size(u_mid, sys.m, "dlegendre", "u_mid");
  auto a = to_std(q0), b = to_std(q1), u = to_std(u_mid);
  if (side == Side::minus) {
    return to_eigen(kernels::dlegendre_minus<double>(sys, CSpan<double>(a), CSpan<double>(b), CSpan<double>(u), h),
                    "dlegendre");
  }
  return to_eigen(kernels::dlegendre_plus<double>(sys, CSpan<double>(a), CSpan<double>(b), CSpan<double>(u), h),
                  "dlegendre");
}

double discrete_momentum(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& u_mid, double h,
                         int generator, Side side) {
  Vec xi = generator_field(sys, side == Side::minus ? q0 : q1, generator);
  return dlegendre(sys, q0, q1, u_mid, h, side).dot(xi);
}

std::vector<Vec> node_momenta(const LagrangianSystem& sys, const DiscreteTrajectory& traj) {
  traj.validate(sys);
  std::vector<Vec> p(static_cast<std::size_t>(traj.N) + 1);
  p[0] = dlegendre(sys, traj.q[0], traj.q[1], traj.u[0], traj.h, Side::minus);
  for (int k = 0; k < traj.N; ++k) {
    p[k + 1] = dlegendre(sys, traj.q[k], traj.q[k + 1], traj.u[k], traj.h, Side::plus);
  }
  return p;
}

NoetherAudit noether_audit(const LagrangianSystem& sys, const DiscreteTrajectory& traj, int generator) {
  traj.validate(sys);
  NoetherAudit audit;
  const int N = traj.N;
  std::vector<Vec> p = node_momenta(sys, traj);
  std::vector<Vec> xi(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    xi[k] = generator_field(sys, traj.q[k], generator);
    audit.momenta.push_back(p[k].dot(xi[k]));
    audit.scale = std::max(audit.scale, std::fabs(audit.momenta.back()));
  }
  for (int k = 0; k < N; ++k) {
    auto a = to_std(traj.q[k]), b = to_std(traj.q[k + 1]), u = to_std(traj.u[k]);
    std::vector<double> d1, d2;
    kernels::discrete_lagrangian_slots<double>(sys, CSpan<double>(a), CSpan<double>(b), traj.h, d1, d2);
    Vec f = to_eigen(kernels::discrete_force<double>(sys, CSpan<double>(a), CSpan<double>(b), CSpan<double>(u), traj.h),
                     "noether_audit");
    const double forcing = f.dot(xi[k]) + f.dot(xi[k + 1]);
    const double breaking = to_eigen(d1, "noether_audit").dot(xi[k]) + to_eigen(d2, "noether_audit").dot(xi[k + 1]);
    const double delta = (audit.momenta[k + 1] - audit.momenta[k]) - forcing - breaking;
    audit.forcing.push_back(forcing);
    audit.symmetry_breaking.push_back(breaking);
    audit.residuals.push_back(delta);
    audit.total += delta;
    audit.max_abs = std::max(audit.max_abs, std::fabs(delta));
    audit.sum_abs += std::fabs(delta);
  }
  return audit;
}

double momentum_balance(const LagrangianSystem& sys, const Vec& q0, const Vec& q1, const Vec& p0, const Vec& p1,
                        const Vec& V, const Vec& u_mid, double h, int generator) {
  check_h(h, "momentum_balance");
  Vec xi0 = generator_field(sys, q0, generator);
  Vec xi1 = generator_field(sys, q1, generator);
  Vec Q = 0.5 * (q0 + q1);
  auto Qs = to_std(Q), Vs = to_std(V), us = to_std(u_mid);
  Vec Lq = to_eigen(kernels::lagrangian_dq<double>(sys, CSpan<double>(Qs), CSpan<double>(Vs)), "momentum_balance");
  Vec Lv = to_eigen(kernels::legendre<double>(sys, CSpan<double>(Qs), CSpan<double>(Vs)), "momentum_balance");
  Vec f = to_eigen(kernels::force<double>(sys, CSpan<double>(Qs), CSpan<double>(Vs), CSpan<double>(us)),
                   "momentum_balance");
  const double change = p1.dot(xi1) - p0.dot(xi0);
  const double source = 0.5 * h * (Lq + f).dot(xi0 + xi1) + Lv.dot(xi1 - xi0);
  return change - source;
}

}  // namespace dmoc
