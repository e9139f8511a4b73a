#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dmoc/diff/derivatives.hpp"
#include "dmoc/model/lagrangian_system.hpp"
#include "dmoc/ocp/ocp.hpp"
#include "dmoc/problems/problems.hpp"
#include "dmoc/simulate/simulate.hpp"
#include "dmoc/sqp/sqp.hpp"

using namespace dmoc;
using std::numbers::pi;

namespace {

sqp::SqpResult solve_dmoc(const Ocp& ocp) {
  const Nlp nlp = transcribe(ocp);
  return sqp::solve(nlp, initial_guess(nlp));
}

}  // namespace

TEST(OrbitalTransfer, BoundaryDataAndHorizon) {
  const problems::OrbitalParams p;
  const Ocp ocp = problems::orbital_transfer(p, 16);
  EXPECT_EQ(ocp.N, 16);
  EXPECT_EQ(ocp.q0, (Vec{{1.0, 0.0}}));
  EXPECT_DOUBLE_EQ(ocp.qdot0[1], 1.0);
  EXPECT_DOUBLE_EQ(ocp.qT[0], 11.0);
  EXPECT_DOUBLE_EQ(ocp.qT[1], 2 * pi * 2);
  EXPECT_NEAR(ocp.qdotT[1], std::sqrt(1.0 / 1331.0), 1e-15);
  EXPECT_EQ(ocp.qdot0[0], 0.0);
  EXPECT_EQ(ocp.qdotT[0], 0.0);
  // 2·sqrt(4π²·12³/8) = 4π·sqrt(216).
  EXPECT_NEAR(ocp.T, 4 * pi * std::sqrt(216.0), 1e-10);
}

TEST(OrbitalTransfer, HorizonReducesToCircularPeriod) {
  problems::OrbitalParams p;
  p.d = 1;
  p.r0 = p.rT = 2.5;
  p.gammaM = 3.0;
  EXPECT_NEAR(problems::orbital_horizon(p), std::sqrt(4 * pi * pi * std::pow(2.5, 3) / 3.0), 1e-12);
}

TEST(OrbitalTransfer, LiteralRadiiInstance) {
  const problems::OrbitalParams p = problems::OrbitalParams::literal_radii();
  const Ocp ocp = problems::orbital_transfer(p, 8);
  EXPECT_EQ(ocp.q0[0], 30.0);
  EXPECT_EQ(ocp.qT[0], 330.0);
  EXPECT_NEAR(ocp.qdot0[1], std::sqrt(1.0 / 27000.0), 1e-16);
}

TEST(OrbitalTransfer, EqualRadiiGiveZeroEffort) {
  problems::OrbitalParams p;
  p.rT = p.r0;
  p.d = 1;
  const Ocp ocp = problems::orbital_transfer(p, 16);
  const sqp::SqpResult r = solve_dmoc(ocp);
  ASSERT_EQ(r.status, sqp::SqpStatus::converged);
  EXPECT_LE(std::fabs(r.objective), 1e-12);
  const DiscreteTrajectory t = decode_trajectory(transcribe(ocp), r.x);
  for (const Vec& u : t.u) EXPECT_LE(std::fabs(u[0]), 1e-6);
  for (const Vec& q : t.q) EXPECT_NEAR(q[0], p.r0, 1e-6);
}

TEST(OrbitalTransfer, ParamsValidation) {
  problems::OrbitalParams p;
  p.r0 = 0.0;
  EXPECT_THROW(problems::orbital_transfer(p, 8), std::invalid_argument);
  p = {};
  p.d = 0;
  EXPECT_THROW(problems::orbital_transfer(p, 8), std::invalid_argument);
}

TEST(OrbitalSystem, ForceAlongMotion) {
  const LagrangianSystem orb = problems::orbital_system({});
  const auto f = orb.fL(std::vector<double>{2.5, 0.3, 0.1, 0.4, 0.7});
  EXPECT_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 2.5 * 0.7);
}

TEST(OrbitalSystem, GeneratorInvarianceAtRandomPoints) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const LagrangianSystem orb = problems::orbital_system({});
  for (int i = 0; i < 50; ++i) {
    const Vec q{{0.5 + std::fabs(U(rng)), U(rng)}}, qd{{U(rng), U(rng)}};
    const Vec g = diff::gradient(orb.L, Vec{{q[0], q[1], qd[0], qd[1]}});
    const Vec xi = generator_field(orb, q, 0);
    EXPECT_EQ(xi, (Vec{{0.0, 1.0}}));
    EXPECT_EQ(g[0] * xi[0] + g[1] * xi[1], 0.0);
  }
}

TEST(OrbitalSystem, CircularBoundaryDataIsEquilibrium) {
  const Ocp ocp = problems::orbital_transfer({}, 8);
  EXPECT_LE(forced_el_residual(ocp.sys, ocp.q0, ocp.qdot0, Vec::Zero(2), Vec::Zero(1)).lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_LE(forced_el_residual(ocp.sys, ocp.qT, ocp.qdotT, Vec::Zero(2), Vec::Zero(1)).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(TwoLink, BoundaryData) {
  const Ocp ocp = problems::two_link({}, 10);
  EXPECT_EQ(ocp.q0, (Vec{{-pi / 2, -pi / 2}}));
  EXPECT_EQ(ocp.qT, (Vec{{pi / 2, pi / 2}}));
  EXPECT_EQ(ocp.qdot0, Vec::Zero(2));
  EXPECT_EQ(ocp.qdotT, Vec::Zero(2));
  EXPECT_EQ(ocp.T, 1.0);
  // Running cost ½(τ1² + τ2²).
  const auto c = ocp.C(std::vector<double>{0.0, 0.0, 0.0, 0.0, 3.0, -4.0});
  EXPECT_DOUBLE_EQ(c[0], 12.5);
}

TEST(TwoLink, DefaultsAreUniformRods) {
  const problems::TwoLinkParams p;
  EXPECT_EQ(p.m1, 1.0);
  EXPECT_EQ(p.l2, 1.0);
  EXPECT_DOUBLE_EQ(p.J1, 1.0 / 12);
  EXPECT_DOUBLE_EQ(p.J2, 1.0 / 12);
  EXPECT_EQ(p.g, 9.81);
}

TEST(TwoLink, KineticEnergyByHand) {
  problems::TwoLinkParams p;
  p.m1 = 1.3;
  p.m2 = 0.7;
  p.l1 = 1.1;
  p.J1 = 0.2;
  const LagrangianSystem s = problems::two_link_system(p);
  // At q = 0 the potential vanishes, so L = K.
  const double K = s.L(std::vector<double>{0.0, 0.0, 1.0, 0.0})[0];
  EXPECT_NEAR(K, (p.m1 + 4 * p.m2) * p.l1 * p.l1 / 8 + 0.5 * p.J1, 1e-15);
}

TEST(TwoLink, ForceAtBaseOfFirstLink) {
  const LagrangianSystem s = problems::two_link_system({});
  const auto f = s.fL(std::vector<double>{0.1, 0.2, 0.3, 0.4, 1.5, 0.5});
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 0.5);
}

TEST(TwoLink, StartIsStableEquilibrium) {
  const Ocp ocp = problems::two_link({}, 10);
  EXPECT_LE(forced_el_residual(ocp.sys, ocp.q0, Vec::Zero(2), Vec::Zero(2), Vec::Zero(2)).lpNorm<Eigen::Infinity>(),
            1e-14);
}

TEST(TwoLink, NoGravityRestToRestIsFree) {
  problems::TwoLinkParams p;
  p.g = 0.0;
  Ocp ocp = problems::two_link(p, 10);
  ocp.qT = ocp.q0;
  const sqp::SqpResult r = solve_dmoc(ocp);
  ASSERT_EQ(r.status, sqp::SqpStatus::converged);
  EXPECT_LE(std::fabs(r.objective), 1e-14);
}

TEST(TestSystems, FreeParticleDelIsLinear) {
  const LagrangianSystem fp = problems::free_particle(1);
  const Vec q2 = del_step(fp, Vec::Constant(1, 0.3), Vec::Constant(1, 0.8), Vec::Zero(1), Vec::Zero(1), 0.2);
  EXPECT_NEAR(q2[0], 2 * 0.8 - 0.3, 1e-15);
}

TEST(TestSystems, PendulumEquilibriumIsFixedPoint) {
  const RolloutResult r =
      rollout(problems::pendulum(), Vec::Zero(1), Vec::Zero(1), std::vector<Vec>(20, Vec::Zero(1)), 0.1, 20);
  for (const Vec& q : r.trajectory.q) EXPECT_EQ(q[0], 0.0);
}

TEST(TestSystems, FreeParticleTransferOptimumIsZero) {
  const sqp::SqpResult r = solve_dmoc(problems::free_particle_transfer(8));
  ASSERT_EQ(r.status, sqp::SqpStatus::converged);
  EXPECT_LE(std::fabs(r.objective), 1e-14);
}

TEST(Registry, ListsBenchmarks) {
  const auto& names = problems::problem_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "orbital"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "two-link"), names.end());
}
