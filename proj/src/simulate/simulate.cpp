#include "dmoc/simulate/simulate.hpp"

#include <cmath>
#include <string>

#include "dmoc/detail/convert.hpp"
#include "dmoc/discmech/kernels.hpp"
#include "dmoc/errors.hpp"

namespace dmoc {

using diff::D1;
using kernels::CSpan;

Vec solve_forward(const LagrangianSystem& sys, const Vec& q, const Vec& p, const Vec& u_mid, double h,
                  const Vec& guess, const NewtonOptions& opts) {
  const int n = sys.n;
  detail::check_size(q, n, "solve_forward", "q");
  detail::check_size(p, n, "solve_forward", "p");
  detail::check_size(u_mid, sys.m, "solve_forward", "u");
  if (!(h > 0)) throw std::invalid_argument("solve_forward: h must be positive");
  const auto qs = detail::to_std(q), us = detail::to_std(u_mid);
  const auto qD = kernels::lift<D1>(CSpan<double>(qs)), uD = kernels::lift<D1>(CSpan<double>(us));
  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());

  Vec q1 = guess;
  for (int it = 0; it <= opts.max_iter; ++it) {
    auto q1s = detail::to_std(q1);
    std::vector<double> r;
    auto J = diff::jacobian_t<double>(
        [&](CSpan<D1> z) {
          std::vector<D1> left, right;
          kernels::step_contributions<D1>(sys, CSpan<D1>(qD), z, CSpan<D1>(uD), h, left, right);
          for (int i = 0; i < n; ++i) left[i] += p[i];
          return left;
        },
        CSpan<double>(q1s), &r);
    Vec res = detail::to_eigen(r, "solve_forward");
    const bool converged = res.lpNorm<Eigen::Infinity>() <= opts.tol * scale;
    if (!converged && it == opts.max_iter) break;
    Mat Je(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Je(i, j) = J(i, j);
    Eigen::PartialPivLU<Mat> lu(Je);
    if (std::fabs(lu.determinant()) < 1e-300) throw SingularMatrixError("solve_forward: singular step Jacobian");
    // Converged iterates still get the correction already paid for: residuals
    // of successive steps add up in the momenta over long rollouts.
    if (converged) {
      const Vec polished = q1 - lu.solve(res);
      return polished.allFinite() ? polished : q1;
    }
    q1 -= lu.solve(res);
    if (!q1.allFinite()) throw NonFiniteError("solve_forward: Newton iterate left the finite range");
  }
  throw ConvergenceError("solve_forward: Newton did not converge in " + std::to_string(opts.max_iter) +
                         " iterations (step too large or singular mass matrix?)");
}

Vec initial_step(const LagrangianSystem& sys, const Vec& q0, const Vec& qdot0, const Vec& u_mid, double h,
                 const NewtonOptions& opts) {
  return solve_forward(sys, q0, legendre(sys, q0, qdot0), u_mid, h, q0 + h * qdot0, opts);
}

Vec del_step(const LagrangianSystem& sys, const Vec& q_prev, const Vec& q, const Vec& u_prev, const Vec& u, double h,
             const NewtonOptions& opts) {
  const Vec p = dlegendre(sys, q_prev, q, u_prev, h, Side::plus);
  return solve_forward(sys, q, p, u, h, 2.0 * q - q_prev, opts);
}

RolloutResult rollout(const LagrangianSystem& sys, const Vec& q0, const Vec& qdot0, const std::vector<Vec>& controls,
                      double h, int N, const NewtonOptions& opts) {
  sys.validate();
  if (N < 1) throw std::invalid_argument("rollout: N must be positive");
  if (static_cast<int>(controls.size()) != N) {
    throw DimensionError("rollout: expected " + std::to_string(N) + " controls, got " +
                         std::to_string(controls.size()));
  }
  RolloutResult out;
  auto& t = out.trajectory;
  t.h = h;
  t.N = N;
  t.u = controls;
  t.q.reserve(static_cast<std::size_t>(N) + 1);
  t.q.push_back(q0);
  try {
    t.q.push_back(initial_step(sys, q0, qdot0, controls[0], h, opts));
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("rollout step 0: ") + e.what());
  }
  // Carry the plus-side momentum forward; it equals the DEL form at each node.
  Vec p = dlegendre(sys, t.q[0], t.q[1], controls[0], h, Side::plus);
  out.momenta.push_back(dlegendre(sys, t.q[0], t.q[1], controls[0], h, Side::minus));
  out.momenta.push_back(p);
  for (int k = 1; k < N; ++k) {
    try {
      t.q.push_back(solve_forward(sys, t.q[k], p, controls[k], h, 2.0 * t.q[k] - t.q[k - 1], opts));
    } catch (const std::exception& e) {
      throw ConvergenceError("rollout step " + std::to_string(k) + ": " + e.what());
    }
    p = dlegendre(sys, t.q[k], t.q[k + 1], controls[k], h, Side::plus);
    out.momenta.push_back(p);
  }
  out.energies.reserve(out.momenta.size());
  for (int k = 0; k <= N; ++k) {
    out.energies.push_back(hamiltonian(sys, t.q[k], legendre_inverse(sys, t.q[k], out.momenta[k])));
  }
  return out;
}

EnergyStats energy_series(const RolloutResult& result) {
  EnergyStats s;
  const auto& E = result.energies;
  if (E.empty()) return s;
  const double n = static_cast<double>(E.size());
  double km = 0.0, em = 0.0;
  for (std::size_t k = 0; k < E.size(); ++k) {
    s.max_deviation = std::max(s.max_deviation, std::fabs(E[k] - E[0]));
    km += static_cast<double>(k);
    em += E[k];
  }
  km /= n;
  em /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < E.size(); ++k) {
    const double dk = static_cast<double>(k) - km;
    sxy += dk * (E[k] - em);
    sxx += dk * dk;
  }
  s.slope = sxx > 0 ? sxy / sxx : 0.0;
  return s;
}

}  // namespace dmoc
