#pragma once

#include <string>
#include <vector>

#include "dmoc/ocp/ocp.hpp"

namespace dmoc::problems {

/// Planar satellite in polar coordinates q = (r, φ) with tangential thrust.
struct OrbitalParams {
  double m = 1.0;
  double gammaM = 1.0;  ///< gravitational parameter γM
  double r0 = 1.0;
  double rT = 11.0;
  int d = 2;            ///< revolutions during the transfer

  /// r0 = 30, rT = 330 with the remaining defaults.
  static OrbitalParams literal_radii();
  void validate() const;
};

/// Two planar links hinged at a fixed base, angles from the horizontal.
struct TwoLinkParams {
  double m1 = 1.0, m2 = 1.0;
  double l1 = 1.0, l2 = 1.0;
  double J1 = 1.0 / 12.0, J2 = 1.0 / 12.0;  ///< uniform rods about their centres
  double g = 9.81;

  void validate() const;
};

/// L = ½m(ṙ² + r²φ̇²) + γMm/r, f_L = (0, r·u); generator (0, 1) (rotation).
LagrangianSystem orbital_system(const OrbitalParams& p);

/// K from the link inertias and the coupling term cos(θ1−θ2)θ̇1θ̇2,
/// V = ½m1 g l1 sin θ1 + m2 g l1 sin θ1 + ½m2 g l2 sin θ2, f_L = (τ1−τ2, τ2).
/// Generator (1, 1) rotates both links; gravity breaks that symmetry unless g = 0.
LagrangianSystem two_link_system(const TwoLinkParams& p);

/// L = ½q̇² − (1 − cos q), torque u.
LagrangianSystem pendulum();

/// L = ½‖q̇‖² on R^dim, force u ∈ R^dim, translation generators e_i.
LagrangianSystem free_particle(int dim = 1);

/// L = ½q̇² − ½q², force u.
LagrangianSystem harmonic_oscillator();

/// d·sqrt(4π²(r0 + rT)³ / (8γM)).
double orbital_horizon(const OrbitalParams& p);

/// Circular orbit at r0 to circular orbit at rT in time orbital_horizon,
/// final angle 2πd, running cost u².
Ocp orbital_transfer(const OrbitalParams& p, int N);

/// (−π/2, −π/2) at rest to (π/2, π/2) at rest, T = 1, cost ½(τ1² + τ2²).
Ocp two_link(const TwoLinkParams& p, int N);

/// Uniform motion q(t) = t on [0, 1] with cost u²: optimum u ≡ 0, objective 0.
Ocp free_particle_transfer(int N);

/// Pendulum from rest at 0 to rest at π/2 in T = 2 with cost u².
Ocp pendulum_swing(int N);

/// Registered problem names.
const std::vector<std::string>& problem_names();

}  // namespace dmoc::problems
