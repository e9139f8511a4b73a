#include "dmoc/model/lagrangian_system.hpp"

#include <cmath>
#include <string>

#include "dmoc/detail/convert.hpp"
#include "dmoc/model/kernels.hpp"

namespace dmoc {

namespace {

using kernels::CSpan;

using detail::to_eigen;
using detail::to_std;

void check(const LagrangianSystem& sys, const Vec& v, int expected, const char* what, const char* arg) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": " + arg + " has size " + std::to_string(v.size()) + ", expected " +
                         std::to_string(expected) + " for system '" + sys.name + "'");
  }
}

}  // namespace

void LagrangianSystem::validate() const {
  if (n <= 0) throw DimensionError("LagrangianSystem: n must be positive");
  if (m < 0) throw DimensionError("LagrangianSystem: m must be non-negative");
  if (!L || L.input_dim() != 2 * n || L.output_dim() != 1) {
    throw DimensionError("LagrangianSystem: L must map R^(2n) to R");
  }
  if (!fL || fL.input_dim() != 2 * n + m || fL.output_dim() != n) {
    throw DimensionError("LagrangianSystem: f_L must map R^(2n+m) to R^n");
  }
  for (const auto& xi : symmetry_generators) {
    if (xi.input_dim() != n || xi.output_dim() != n) {
      throw DimensionError("LagrangianSystem: symmetry generators must map R^n to R^n");
    }
  }
}

Vec legendre(const LagrangianSystem& sys, const Vec& q, const Vec& qdot) {
  check(sys, q, sys.n, "legendre", "q");
  check(sys, qdot, sys.n, "legendre", "qdot");
  auto qs = to_std(q), vs = to_std(qdot);
  return to_eigen(kernels::legendre<double>(sys, CSpan<double>(qs), CSpan<double>(vs)), "legendre");
}

Vec legendre_inverse(const LagrangianSystem& sys, const Vec& q, const Vec& p) {
  check(sys, q, sys.n, "legendre_inverse", "q");
  check(sys, p, sys.n, "legendre_inverse", "p");
  auto qs = to_std(q), ps = to_std(p);
  return to_eigen(kernels::legendre_inverse<double>(sys, CSpan<double>(qs), CSpan<double>(ps)), "legendre_inverse");
}

Vec forced_el_residual(const LagrangianSystem& sys, const Vec& q, const Vec& qdot, const Vec& qddot, const Vec& u) {
  check(sys, q, sys.n, "forced_el_residual", "q");
  check(sys, qdot, sys.n, "forced_el_residual", "qdot");
  check(sys, qddot, sys.n, "forced_el_residual", "qddot");
  check(sys, u, sys.m, "forced_el_residual", "u");
  auto qs = to_std(q), vs = to_std(qdot), as = to_std(qddot), us = to_std(u);
  return to_eigen(kernels::el_residual<double>(sys, CSpan<double>(qs), CSpan<double>(vs), CSpan<double>(as),
                                               CSpan<double>(us)),
                  "forced_el_residual");
}

double momentum_map(const LagrangianSystem& sys, const Vec& q, const Vec& qdot, int generator) {
  Vec xi = generator_field(sys, q, generator);
  return legendre(sys, q, qdot).dot(xi);
}

double hamiltonian(const LagrangianSystem& sys, const Vec& q, const Vec& qdot) {
  check(sys, q, sys.n, "hamiltonian", "q");
  check(sys, qdot, sys.n, "hamiltonian", "qdot");
  auto qs = to_std(q), vs = to_std(qdot);
  double h = kernels::hamiltonian<double>(sys, CSpan<double>(qs), CSpan<double>(vs));
  if (!std::isfinite(h)) throw NonFiniteError("hamiltonian: non-finite output");
  return h;
}

Mat mass_matrix(const LagrangianSystem& sys, const Vec& q, const Vec& qdot) {
  check(sys, q, sys.n, "mass_matrix", "q");
  check(sys, qdot, sys.n, "mass_matrix", "qdot");
  auto qs = to_std(q), vs = to_std(qdot);
  auto M = kernels::mass_matrix<double>(sys, CSpan<double>(qs), CSpan<double>(vs));
  Mat out(M.rows, M.cols);
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) out(i, j) = M(i, j);
  return out;
}

Vec acceleration(const LagrangianSystem& sys, const Vec& q, const Vec& qdot, const Vec& u) {
  check(sys, q, sys.n, "acceleration", "q");
  check(sys, qdot, sys.n, "acceleration", "qdot");
  check(sys, u, sys.m, "acceleration", "u");
  auto qs = to_std(q), vs = to_std(qdot), us = to_std(u);
  return to_eigen(kernels::acceleration<double>(sys, CSpan<double>(qs), CSpan<double>(vs), CSpan<double>(us)),
                  "acceleration");
}

Vec generator_field(const LagrangianSystem& sys, const Vec& q, int generator) {
  check(sys, q, sys.n, "generator_field", "q");
  auto qs = to_std(q);
  return to_eigen(kernels::generator<double>(sys, generator, CSpan<double>(qs)), "generator_field");
}

}  // namespace dmoc
