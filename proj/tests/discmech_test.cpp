#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dmoc/discmech/discmech.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/model/lagrangian_system.hpp"
#include "dmoc/problems/problems.hpp"
#include "dmoc/simulate/simulate.hpp"

using namespace dmoc;
using std::numbers::pi;

namespace {

Vec s(double x) { return Vec::Constant(1, x); }

LagrangianSystem kinetic1() { return problems::free_particle(1); }

}  // namespace

TEST(MidpointScheme, IsSymplectic) {
  MidpointScheme m;
  EXPECT_TRUE(m.symplectic());
  EXPECT_EQ(m.c, 0.5);
  EXPECT_EQ(m.b, 1.0);
}

TEST(DiscreteLagrangian, Examples) {
  EXPECT_NEAR(discrete_lagrangian(kinetic1(), s(0), s(1), 0.1), 5.0, 1e-12);
  // h(½V² − ½Q²) with V = 1, Q = ½: 0.5 − 0.125.
  EXPECT_DOUBLE_EQ(discrete_lagrangian(problems::harmonic_oscillator(), s(0), s(1), 1.0), 0.375);
  const double q = 0.7, h = 0.3;
  EXPECT_NEAR(discrete_lagrangian(problems::pendulum(), s(q), s(q), h), -h * (1 - std::cos(q)), 1e-15);
}

TEST(DiscreteLagrangian, RejectsNonPositiveStep) {
  EXPECT_THROW(discrete_lagrangian(kinetic1(), s(0), s(1), 0.0), std::invalid_argument);
}

TEST(DiscreteForces, Examples) {
  StepForces f = discrete_forces(problems::pendulum(), s(0.2), s(0.3), s(0.0), 0.1);
  EXPECT_EQ(f.f_minus, s(0));
  EXPECT_EQ(f.f_plus, s(0));
  f = discrete_forces(problems::orbital_system({}), Vec{{1.0, 0.0}}, Vec{{1.0, pi / 8}}, s(2.0), 0.1);
  EXPECT_NEAR(f.f_minus[0], 0.0, 1e-15);
  EXPECT_NEAR(f.f_minus[1], 0.1, 1e-15);
  EXPECT_EQ(f.f_minus, f.f_plus);
  f = discrete_forces(problems::two_link_system({}), Vec{{0.1, 0.2}}, Vec{{0.3, 0.1}}, Vec{{1.0, 1.0}}, 0.2);
  EXPECT_NEAR(f.f_minus[0], 0.0, 1e-15);
  EXPECT_NEAR(f.f_minus[1], 0.1, 1e-15);
  EXPECT_EQ(f.f_minus, f.f_plus);
}

TEST(DelResidual, FreeParticleUniformMotion) {
  const LagrangianSystem fp = problems::free_particle(2);
  const Vec r = del_residual(fp, Vec{{0, 0}}, Vec{{1, 1}}, Vec{{2, 2}}, Vec::Zero(2), Vec::Zero(2), 0.5);
  EXPECT_LE(r.norm(), 1e-14);
}

TEST(DelResidual, HarmonicOscillatorMatchesSymbolicExpansion) {
  const double h = 0.1, q0 = 0.0, q1 = 0.1, q2 = 0.19;
  const double expected = (q1 - q0) / h - (q2 - q1) / h - (h / 4) * (q0 + 2 * q1 + q2);
  const Vec r = del_residual(problems::harmonic_oscillator(), s(q0), s(q1), s(q2), s(0), s(0), h);
  EXPECT_NEAR(r[0], expected, 1e-14);
  EXPECT_NEAR(r[0], 0.09025, 1e-14);
}

TEST(DelResidual, ForcedPendulumByHand) {
  // V0 − V1 − (h/2)(sin Q0 + sin Q1) + (h/2)(u0 + u1).
  const double h = 0.2, a = 0.1, b = 0.35, c = 0.5, u0 = 0.3, u1 = -0.4;
  const double expected = (b - a) / h - (c - b) / h - 0.5 * h * (std::sin(0.5 * (a + b)) + std::sin(0.5 * (b + c))) +
                          0.5 * h * (u0 + u1);
  EXPECT_NEAR(del_residual(problems::pendulum(), s(a), s(b), s(c), s(u0), s(u1), h)[0], expected, 1e-14);
}

TEST(Dlegendre, Examples) {
  EXPECT_NEAR(dlegendre(kinetic1(), s(0), s(1), s(0), 0.1, Side::plus)[0], 10.0, 1e-12);
  EXPECT_NEAR(dlegendre(kinetic1(), s(0), s(1), s(0), 0.1, Side::minus)[0], 10.0, 1e-12);
}

TEST(Dlegendre, MomentumMatchesAcrossDelFeasibleTriple) {
  // Orbital, zero control: q2 from the DEL step, then p⁺(q0,q1) = p⁻(q1,q2).
  const LagrangianSystem orb = problems::orbital_system({});
  const double h = 0.05;
  const Vec q0{{1.2, 0.0}}, q1{{1.21, 0.04}};
  const Vec q2 = del_step(orb, q0, q1, s(0), s(0), h);
  const Vec pp = dlegendre(orb, q0, q1, s(0), h, Side::plus);
  const Vec pm = dlegendre(orb, q1, q2, s(0), h, Side::minus);
  EXPECT_NEAR(pp[1], pm[1], 1e-10 * std::max(1.0, std::fabs(pp[1])));
  EXPECT_LE((pp - pm).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(DiscreteMomentum, Examples) {
  const LagrangianSystem fp = problems::free_particle(1);
  EXPECT_NEAR(discrete_momentum(fp, s(0.2), s(0.5), s(0), 0.3, 0, Side::plus), 1.0, 1e-12);
  // Unforced orbital, h → 0: matches m r² φ̇.
  const LagrangianSystem orb = problems::orbital_system({});
  const double h = 1e-4, r = 1.5, w = 0.4;
  const Vec q0{{r, 0.0}}, q1{{r, w * h}};
  EXPECT_NEAR(discrete_momentum(orb, q0, q1, s(0), h, 0, Side::plus), momentum_map(orb, q0, Vec{{0.0, w}}, 0), 1e-6);
  // q0 = q1, zero control, pendulum-like potential in a generator direction:
  // p⁺ = −(h/2) ∂V/∂q, here on the free particle with potential added.
  const LagrangianSystem ho = problems::harmonic_oscillator();
  const double q = 0.8, hh = 0.2;
  EXPECT_NEAR(dlegendre(ho, s(q), s(q), s(0), hh, Side::plus)[0], -(hh / 2) * q, 1e-14);
}

TEST(DiscreteMomentum, MissingGeneratorThrows) {
  EXPECT_THROW(discrete_momentum(problems::pendulum(), s(0), s(0.1), s(0), 0.1, 0, Side::plus), std::out_of_range);
}

TEST(NodeMomenta, EndpointsFromOuterSides) {
  const LagrangianSystem fp = problems::free_particle(1);
  DiscreteTrajectory t{0.5, 2, {s(0.0), s(1.0), s(3.0)}, {s(0), s(0)}};
  const auto p = node_momenta(fp, t);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0][0], 2.0, 1e-14);
  EXPECT_NEAR(p[1][0], 2.0, 1e-14);  // plus side of step 0
  EXPECT_NEAR(p[2][0], 4.0, 1e-14);
}

TEST(NoetherAudit, UnforcedExactTrajectoryBalances) {
  // Uniform motion is DEL-feasible in exact arithmetic.
  const LagrangianSystem fp = problems::free_particle(2);
  DiscreteTrajectory t{0.1, 5, {}, std::vector<Vec>(5, Vec::Zero(2))};
  for (int k = 0; k <= 5; ++k) t.q.push_back(Vec{{0.3 + 0.7 * k, -0.2 * k}});
  const NoetherAudit a = noether_audit(fp, t, 0);
  EXPECT_LE(a.max_abs, 1e-12 * a.scale);
  EXPECT_LE(std::fabs(a.total), 1e-12 * a.scale);
}

TEST(NoetherAudit, UnforcedRolloutBalancesToFeasibility) {
  const LagrangianSystem orb = problems::orbital_system({});
  const int N = 200;
  const double h = 0.05;
  const RolloutResult r = rollout(orb, Vec{{1.0, 0.0}}, Vec{{0.1, 1.1}}, std::vector<Vec>(N, s(0)), h, N);
  double del = 0.0;
  for (int k = 1; k < N; ++k) {
    const auto& q = r.trajectory.q;
    del = std::max(del, del_residual(orb, q[k - 1], q[k], q[k + 1], s(0), s(0), h).lpNorm<Eigen::Infinity>());
  }
  const NoetherAudit a = noether_audit(orb, r.trajectory, 0);
  EXPECT_LE(a.max_abs, 1e-12 * a.scale + del);
  EXPECT_LE(std::fabs(a.total), 1e-12 * a.scale + N * del);
}

TEST(NoetherAudit, ForcedRolloutMomentumChangeEqualsForcing) {
  const LagrangianSystem orb = problems::orbital_system({});
  const int N = 100;
  std::vector<Vec> u;
  for (int k = 0; k < N; ++k) u.push_back(s(0.05 * std::sin(0.1 * k)));
  const RolloutResult r = rollout(orb, Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}, u, 0.05, N);
  const NoetherAudit a = noether_audit(orb, r.trajectory, 0);
  // Δ_k is the DEL residual contracted with ξ, so it sits at Newton tolerance.
  EXPECT_LE(a.max_abs, 1e-9 * a.scale);
  double forcing = 0.0;
  for (double f : a.forcing) forcing += f;
  EXPECT_GT(std::fabs(forcing), 1e-3);
  EXPECT_NEAR(a.momenta.back() - a.momenta.front(), forcing, 1e-9 * a.scale);
}

TEST(NoetherAudit, SingleStepIdentityForInvariantLd) {
  // Free particle, ξ = e1: Δ_0 = 0 for any (q0, q1) and any control.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const LagrangianSystem fp = problems::free_particle(1);
  for (int i = 0; i < 20; ++i) {
    DiscreteTrajectory t{0.3, 1, {s(U(rng)), s(U(rng))}, {s(U(rng))}};
    EXPECT_LE(std::fabs(noether_audit(fp, t, 0).residuals[0]), 1e-13);
  }
}

TEST(NoetherAudit, TwoLinkGravityBreaksSymmetry) {
  const LagrangianSystem tl = problems::two_link_system({});
  DiscreteTrajectory t{0.1, 1, {Vec{{0.1, 0.2}}, Vec{{0.15, 0.22}}}, {Vec::Zero(2)}};
  const NoetherAudit a = noether_audit(tl, t, 0);
  EXPECT_GT(std::fabs(a.symmetry_breaking[0]), 1e-3);
  problems::TwoLinkParams p;
  p.g = 0.0;
  EXPECT_LE(std::fabs(noether_audit(problems::two_link_system(p), t, 0).symmetry_breaking[0]), 1e-14);
}

TEST(Properties, TimeReversalOfDiscreteLagrangian) {
  // Swapping endpoints flips V only; L even in q̇ leaves L_d unchanged.
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const LagrangianSystem pend = problems::pendulum();
  for (int i = 0; i < 20; ++i) {
    const double a = U(rng), b = U(rng), h = 0.1 + 0.5 * std::fabs(U(rng));
    EXPECT_NEAR(discrete_lagrangian(pend, s(a), s(b), h), discrete_lagrangian(pend, s(b), s(a), h), 1e-15);
    // D2 L_d(q0, q1) = −D1 L_d(q1, q0) for L even in q̇.
    const double plus = dlegendre(pend, s(a), s(b), s(0), h, Side::plus)[0];
    const double minus_swapped = dlegendre(pend, s(b), s(a), s(0), h, Side::minus)[0];
    EXPECT_NEAR(plus, -minus_swapped, 1e-13);
  }
}

TEST(Properties, DelFeasibleTriplesMatchMomentaAtRandom) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  const LagrangianSystem tl = problems::two_link_system({});
  for (int i = 0; i < 10; ++i) {
    const double h = 0.05;
    const Vec q0{{U(rng), U(rng)}}, q1 = q0 + h * Vec{{U(rng), U(rng)}};
    const Vec u0{{U(rng), U(rng)}}, u1{{U(rng), U(rng)}};
    const Vec q2 = del_step(tl, q0, q1, u0, u1, h);
    EXPECT_LE(del_residual(tl, q0, q1, q2, u0, u1, h).lpNorm<Eigen::Infinity>(), 1e-9);
    const Vec pp = dlegendre(tl, q0, q1, u0, h, Side::plus);
    const Vec pm = dlegendre(tl, q1, q2, u1, h, Side::minus);
    EXPECT_LE((pp - pm).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}
