#include "dmoc/problems/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dmoc/diff/dual.hpp"

namespace dmoc::problems {

namespace {

using std::numbers::pi;

template <class Span>
using T_of = diff::scalar_t<Span>;

diff::DeepSmoothMap constant_generator(int n, std::vector<double> xi) {
  return diff::DeepSmoothMap(n, n, [xi](auto q) {
    using T = T_of<decltype(q)>;
    std::vector<T> out(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) out[i] = T(xi[i]);
    return out;
  });
}

diff::DeepSmoothMap squared_control_cost(int n, int m, double weight) {
  return diff::DeepSmoothMap(2 * n + m, 1, [n, m, weight](auto z) {
    using T = T_of<decltype(z)>;
    T s(0.0);
    for (int i = 0; i < m; ++i) s += z[2 * n + i] * z[2 * n + i];
    return std::vector<T>{weight * s};
  });
}

}  // namespace

OrbitalParams OrbitalParams::literal_radii() {
  OrbitalParams p;
  p.r0 = 30.0;
  p.rT = 330.0;
  return p;
}

void OrbitalParams::validate() const {
  if (!(m > 0) || !(gammaM > 0) || !(r0 > 0) || !(rT > 0)) {
    throw std::invalid_argument("OrbitalParams: m, gammaM, r0 and rT must be positive");
  }
  if (d < 1) throw std::invalid_argument("OrbitalParams: d must be a positive integer");
}

void TwoLinkParams::validate() const {
  if (!(m1 > 0) || !(m2 > 0) || !(l1 > 0) || !(l2 > 0) || !(J1 > 0) || !(J2 > 0) || !(g >= 0)) {
    throw std::invalid_argument("TwoLinkParams: masses, lengths and inertias must be positive, g non-negative");
  }
}

LagrangianSystem orbital_system(const OrbitalParams& p) {
  p.validate();
  LagrangianSystem s;
  s.name = "orbital";
  s.n = 2;
  s.m = 1;
  const double m = p.m, gm = p.gammaM;
  s.L = diff::DeepSmoothMap(4, 1, [m, gm](auto z) {
    using T = T_of<decltype(z)>;
    const T& r = z[0];
    return std::vector<T>{0.5 * m * (z[2] * z[2] + r * r * z[3] * z[3]) + gm * m / r};
  });
  s.fL = diff::DeepSmoothMap(5, 2, [](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>{T(0.0), z[0] * z[4]};
  });
  s.symmetry_generators.push_back(constant_generator(2, {0.0, 1.0}));
  s.q_labels = {"r", "phi"};
  s.u_labels = {"u"};
  return s;
}

LagrangianSystem two_link_system(const TwoLinkParams& p) {
  p.validate();
  LagrangianSystem s;
  s.name = "two-link";
  s.n = 2;
  s.m = 2;
  s.L = diff::DeepSmoothMap(4, 1, [p](auto z) {
    using T = T_of<decltype(z)>;
    const T &t1 = z[0], &t2 = z[1], &w1 = z[2], &w2 = z[3];
    T K = (0.125 * (p.m1 + 4.0 * p.m2) * p.l1 * p.l1 + 0.5 * p.J1) * w1 * w1 +
          (0.125 * p.m2 * p.l2 * p.l2 + 0.5 * p.J2) * w2 * w2 +
          0.5 * p.m2 * p.l1 * p.l2 * diff::cos(t1 - t2) * w1 * w2;
    T V = (0.5 * p.m1 + p.m2) * p.g * p.l1 * diff::sin(t1) + 0.5 * p.m2 * p.g * p.l2 * diff::sin(t2);
    return std::vector<T>{K - V};
  });
  s.fL = diff::DeepSmoothMap(6, 2, [](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>{z[4] - z[5], z[5]};
  });
  s.symmetry_generators.push_back(constant_generator(2, {1.0, 1.0}));
  s.q_labels = {"theta1", "theta2"};
  s.u_labels = {"tau1", "tau2"};
  return s;
}

LagrangianSystem pendulum() {
  LagrangianSystem s;
  s.name = "pendulum";
  s.n = 1;
  s.m = 1;
  s.L = diff::DeepSmoothMap(2, 1, [](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>{0.5 * z[1] * z[1] - (1.0 - diff::cos(z[0]))};
  });
  s.fL = diff::DeepSmoothMap(3, 1, [](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>{z[2]};
  });
  s.q_labels = {"theta"};
  s.u_labels = {"tau"};
  return s;
}

LagrangianSystem free_particle(int dim) {
  if (dim < 1) throw std::invalid_argument("free_particle: dim must be positive");
  LagrangianSystem s;
  s.name = "free-particle";
  s.n = dim;
  s.m = dim;
  s.L = diff::DeepSmoothMap(2 * dim, 1, [dim](auto z) {
    using T = T_of<decltype(z)>;
    T k(0.0);
    for (int i = 0; i < dim; ++i) k += 0.5 * z[dim + i] * z[dim + i];
    return std::vector<T>{k};
  });
  s.fL = diff::DeepSmoothMap(3 * dim, dim, [dim](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>(z.begin() + 2 * dim, z.end());
  });
  for (int i = 0; i < dim; ++i) {
    std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
    e[i] = 1.0;
    s.symmetry_generators.push_back(constant_generator(dim, e));
    s.q_labels.push_back("x" + std::to_string(i + 1));
    s.u_labels.push_back("f" + std::to_string(i + 1));
  }
  return s;
}

LagrangianSystem harmonic_oscillator() {
  LagrangianSystem s;
  s.name = "harmonic-oscillator";
  s.n = 1;
  s.m = 1;
  s.L = diff::DeepSmoothMap(2, 1, [](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>{0.5 * z[1] * z[1] - 0.5 * z[0] * z[0]};
  });
  s.fL = diff::DeepSmoothMap(3, 1, [](auto z) {
    using T = T_of<decltype(z)>;
    return std::vector<T>{z[2]};
  });
  s.q_labels = {"x"};
  s.u_labels = {"f"};
  return s;
}

double orbital_horizon(const OrbitalParams& p) {
  p.validate();
  const double s = p.r0 + p.rT;
  return p.d * std::sqrt(4.0 * pi * pi * s * s * s / (8.0 * p.gammaM));
}

Ocp orbital_transfer(const OrbitalParams& p, int N) {
  Ocp o;
  o.name = "orbital";
  o.sys = orbital_system(p);
  o.q0 = Vec{{p.r0, 0.0}};
  o.qdot0 = Vec{{0.0, std::sqrt(p.gammaM / (p.r0 * p.r0 * p.r0))}};
  o.qT = Vec{{p.rT, 2.0 * pi * p.d}};
  o.qdotT = Vec{{0.0, std::sqrt(p.gammaM / (p.rT * p.rT * p.rT))}};
  o.C = squared_control_cost(2, 1, 1.0);
  o.T = orbital_horizon(p);
  o.N = N;
  o.validate();
  return o;
}

Ocp two_link(const TwoLinkParams& p, int N) {
  Ocp o;
  o.name = "two-link";
  o.sys = two_link_system(p);
  o.q0 = Vec{{-pi / 2, -pi / 2}};
  o.qdot0 = Vec::Zero(2);
  o.qT = Vec{{pi / 2, pi / 2}};
  o.qdotT = Vec::Zero(2);
  o.C = squared_control_cost(2, 2, 0.5);
  o.T = 1.0;
  o.N = N;
  o.validate();
  return o;
}

Ocp free_particle_transfer(int N) {
  Ocp o;
  o.name = "free-particle";
  o.sys = free_particle(1);
  o.q0 = Vec::Zero(1);
  o.qdot0 = Vec::Ones(1);
  o.qT = Vec::Ones(1);
  o.qdotT = Vec::Ones(1);
  o.C = squared_control_cost(1, 1, 1.0);
  o.T = 1.0;
  o.N = N;
  o.validate();
  return o;
}

Ocp pendulum_swing(int N) {
  Ocp o;
  o.name = "pendulum";
  o.sys = pendulum();
  o.q0 = Vec::Zero(1);
  o.qdot0 = Vec::Zero(1);
  o.qT = Vec::Constant(1, pi / 2);
  o.qdotT = Vec::Zero(1);
  o.C = squared_control_cost(1, 1, 1.0);
  o.T = 2.0;
  o.N = N;
  o.validate();
  return o;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"orbital", "two-link", "free-particle", "pendulum"};
  return names;
}

}  // namespace dmoc::problems
