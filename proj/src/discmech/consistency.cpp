#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "dmoc/detail/convert.hpp"
#include "dmoc/discmech/discmech.hpp"
#include "dmoc/discmech/kernels.hpp"

namespace dmoc {

namespace {

using diff::D1;
using kernels::CSpan;
using State_t = std::vector<double>;

// Augmented flow state: q, v, the 2n x 2n state-transition matrix Φ
// (column-major), the action S = ∫L, and I = ∫ (∂q(t)/∂x(0))ᵀ f_L dt.
struct FlowLayout {
  int n;
  int q() const { return 0; }
  int v() const { return n; }
  int phi() const { return 2 * n; }
  int action() const { return 2 * n + 4 * n * n; }
  int work() const { return action() + 1; }
  int size() const { return work() + 2 * n; }
  double& Phi(State_t& x, int i, int j) const { return x[phi() + j * 2 * n + i]; }
  double Phi(const State_t& x, int i, int j) const { return x[phi() + j * 2 * n + i]; }
};

struct FlowRhs {
  const LagrangianSystem& sys;
  const ControlCurve& control;
  FlowLayout lay;

  void operator()(const State_t& x, State_t& dx, double t) const {
    const int n = lay.n;
    std::vector<double> q(x.begin(), x.begin() + n), v(x.begin() + n, x.begin() + 2 * n);
    std::vector<double> u = detail::to_std(control(t));
    dx.assign(x.size(), 0.0);

    // Acceleration and its Jacobian with respect to (q, v), one sweep per column.
    std::vector<D1> uD = kernels::lift<D1>(CSpan<double>(u));
    std::vector<double> a;
    std::vector<std::vector<double>> Ja(2 * n, std::vector<double>(n));
    for (int c = 0; c < 2 * n; ++c) {
      std::vector<D1> qD(n), vD(n);
      for (int i = 0; i < n; ++i) {
        qD[i] = D1(q[i], c == i ? 1.0 : 0.0);
        vD[i] = D1(v[i], c == n + i ? 1.0 : 0.0);
      }
      std::vector<D1> acc = kernels::acceleration<D1>(sys, CSpan<D1>(qD), CSpan<D1>(vD), CSpan<D1>(uD));
      if (c == 0) {
        a.resize(n);
        for (int i = 0; i < n; ++i) a[i] = acc[i].value;
      }
      for (int i = 0; i < n; ++i) Ja[c][i] = acc[i].deriv;
    }
    for (int i = 0; i < n; ++i) {
      dx[lay.q() + i] = v[i];
      dx[lay.v() + i] = a[i];
    }
    // dΦ/dt = A Φ with A = [[0, I], [∂a/∂q, ∂a/∂v]].
    for (int j = 0; j < 2 * n; ++j) {
      for (int i = 0; i < n; ++i) {
        dx[lay.phi() + j * 2 * n + i] = lay.Phi(x, n + i, j);
        double s = 0.0;
        for (int c = 0; c < 2 * n; ++c) s += Ja[c][i] * lay.Phi(x, c, j);
        dx[lay.phi() + j * 2 * n + n + i] = s;
      }
    }
    dx[lay.action()] = kernels::lagrangian<double>(sys, CSpan<double>(q), CSpan<double>(v));
    std::vector<double> f = kernels::force<double>(sys, CSpan<double>(q), CSpan<double>(v), CSpan<double>(u));
    for (int j = 0; j < 2 * n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += lay.Phi(x, i, j) * f[i];
      dx[lay.work() + j] = s;
    }
  }
};

struct ExactStep {
  Vec q1;
  double action;
  Vec f_minus;
  Vec f_plus;
};

ExactStep exact_step(const LagrangianSystem& sys, const State& initial, const ControlCurve& control, double h) {
  namespace odeint = boost::numeric::odeint;
  FlowLayout lay{sys.n};
  const int n = sys.n;
  State_t x(lay.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    x[lay.q() + i] = initial.q[i];
    x[lay.v() + i] = initial.qdot[i];
  }
  for (int i = 0; i < 2 * n; ++i) lay.Phi(x, i, i) = 1.0;
  FlowRhs rhs{sys, control, lay};
  try {
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State_t>>(1e-14, 1e-14);
    odeint::integrate_adaptive(stepper, rhs, x, 0.0, h, h / 64.0);
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("consistency_order: exact-flow oracle failed: ") + e.what());
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw ConvergenceError("consistency_order: exact-flow oracle produced non-finite state");
  }
  Mat Pqq(n, n), Pqv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Pqq(i, j) = lay.Phi(x, i, j);
      Pqv(i, j) = lay.Phi(x, i, n + j);
    }
  Vec Iq(n), Iv(n);
  for (int i = 0; i < n; ++i) {
    Iq[i] = x[lay.work() + i];
    Iv[i] = x[lay.work() + n + i];
  }
  ExactStep out;
  out.q1 = Vec(n);
  for (int i = 0; i < n; ++i) out.q1[i] = x[lay.q() + i];
  out.action = x[lay.action()];
  // ∂q(t)/∂q1 = Φ_qv(t) Φ_qv(h)⁻¹ and ∂q(t)/∂q0 = Φ_qq(t) − Φ_qv(t) Φ_qv(h)⁻¹ Φ_qq(h).
  Eigen::PartialPivLU<Mat> lu(Pqv.transpose());
  out.f_plus = lu.solve(Iv);
  out.f_minus = Iq - Pqq.transpose() * out.f_plus;
  return out;
}

bool all_tiny(const std::vector<double>& err, double ref) {
  for (double e : err) {
    if (e > 1e-12 * std::max(1.0, ref)) return false;
  }
  return true;
}

}  // namespace

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) throw DimensionError("loglog_slope: need matching series of length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ConsistencyReport consistency_order(const LagrangianSystem& sys, const State& initial, const ControlCurve& control,
                                    const std::vector<double>& h_grid) {
  sys.validate();
  detail::check_size(initial.q, sys.n, "consistency_order", "q");
  detail::check_size(initial.qdot, sys.n, "consistency_order", "qdot");
  if (h_grid.size() < 4) throw std::invalid_argument("consistency_order: h grid needs at least 4 points");
  for (double h : h_grid) {
    if (!(h > 0.0)) throw std::invalid_argument("consistency_order: step sizes must be positive");
  }
  const double ratio = h_grid[1] / h_grid[0];
  if (std::fabs(ratio - 1.0) < 1e-12) throw std::invalid_argument("consistency_order: h grid is not geometric");
  for (std::size_t i = 1; i < h_grid.size(); ++i) {
    if (std::fabs(h_grid[i] / h_grid[i - 1] - ratio) > 1e-9 * ratio) {
      throw std::invalid_argument("consistency_order: h grid is not geometric");
    }
  }

  ConsistencyReport rep;
  rep.h = h_grid;
  double ref_l = 0.0, ref_f = 0.0;
  for (double h : h_grid) {
    ExactStep ex = exact_step(sys, initial, control, h);
    const double Ld = discrete_lagrangian(sys, initial.q, ex.q1, h);
    StepForces fd = discrete_forces(sys, initial.q, ex.q1, control(0.5 * h), h);
    rep.lagrangian_error.push_back(std::fabs(Ld - ex.action));
    rep.force_minus_error.push_back((fd.f_minus - ex.f_minus).lpNorm<Eigen::Infinity>());
    rep.force_plus_error.push_back((fd.f_plus - ex.f_plus).lpNorm<Eigen::Infinity>());
    rep.force_sum_error.push_back(
        ((fd.f_minus + fd.f_plus) - (ex.f_minus + ex.f_plus)).lpNorm<Eigen::Infinity>());
    ref_l = std::max(ref_l, std::fabs(ex.action));
    ref_f = std::max({ref_f, ex.f_minus.lpNorm<Eigen::Infinity>(), ex.f_plus.lpNorm<Eigen::Infinity>()});
  }
  auto fit = [&](const std::vector<double>& err, double ref, double& order, bool& exact) {
    exact = all_tiny(err, ref);
    order = exact ? std::numeric_limits<double>::infinity() : loglog_slope(rep.h, err) - 1.0;
  };
  fit(rep.lagrangian_error, ref_l, rep.lagrangian_order, rep.lagrangian_exact);
  fit(rep.force_minus_error, ref_f, rep.force_minus_order, rep.force_minus_exact);
  fit(rep.force_plus_error, ref_f, rep.force_plus_order, rep.force_plus_exact);
  fit(rep.force_sum_error, ref_f, rep.force_sum_order, rep.force_sum_exact);
  return rep;
}

}  // namespace dmoc
