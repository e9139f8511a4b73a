#include "dmoc/baselines/baselines.hpp"

#include <cmath>
#include <memory>

#include "dmoc/baselines/kernels.hpp"
#include "dmoc/discmech/kernels.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/ocp/transcription_parts.hpp"

namespace dmoc {

namespace {

using detail::node_idx;
using kernels::CSpan;

std::vector<int> join(std::initializer_list<std::vector<int>> parts) {
  std::vector<int> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

enum class Form { hamiltonian, velocity };

/// Midpoint stage of the first-order form: Q, X (p or v mean) and the field there.
template <class T>
void stage_field(Form form, const LagrangianSystem& sys, CSpan<T> Q, CSpan<T> X, CSpan<T> u, std::vector<T>& qdot,
                 std::vector<T>& xdot) {
  if (form == Form::hamiltonian) {
    kernels::hamiltonian_field<T>(sys, Q, X, u, qdot, xdot);
  } else {
    kernels::velocity_field<T>(sys, Q, X, u, qdot, xdot);
  }
}

Nlp transcribe_first_order(const Ocp& ocp_in, Form form) {
  ocp_in.validate();
  if (ocp_in.path_constraints || ocp_in.control_bounds) {
    throw UnsupportedError("transcription: inequality path or control constraints are not supported");
  }
  if (ocp_in.final_constraint) {
    throw UnsupportedError("collocation baselines support only the fixed final state");
  }
  auto P = std::make_shared<const Ocp>(ocp_in);
  const int n = P->sys.n, m = P->sys.m, N = P->N;
  const double h = P->h();
  const bool ham = form == Form::hamiltonian;
  const std::string x = ham ? "p" : "v";

  Nlp nlp;
  nlp.method = ham ? "ham-midpoint" : "vel-midpoint";
  nlp.name = P->name + "/" + nlp.method;
  nlp.ocp = P;
  const LayoutBlock qb = nlp.variables.append("q", N + 1, n, "node");
  const LayoutBlock xb = nlp.variables.append(x, N + 1, n, "node");
  const LayoutBlock ub = nlp.variables.append("u", N, m, "interval");
  nlp.num_vars = nlp.variables.size();

  const LayoutBlock rq0 = nlp.rows.append("q0", 1, n, "node");
  const LayoutBlock rx0 = nlp.rows.append(x + "0", 1, n, "node");
  const LayoutBlock rd = nlp.rows.append("dynamics", N, 2 * n, "interval");
  const LayoutBlock rxN = nlp.rows.append(x + "N", 1, n, "node");
  const LayoutBlock rqN = nlp.rows.append("qN", 1, n, "node");
  nlp.num_cons = nlp.rows.size();
  nlp.constant_rows = Eigen::VectorXd::Zero(nlp.num_cons);

  const Vec x0 = ham ? legendre(P->sys, P->q0, P->qdot0) : P->qdot0;
  const Vec xT = ham ? legendre(P->sys, P->qT, P->qdotT) : P->qdotT;
  detail::add_configuration_rows(nlp, qb, rq0, 0, P->q0);
  detail::add_configuration_rows(nlp, xb, rx0, 0, x0);

  // Local variables: q_k, q_{k+1}, x_k, x_{k+1}, u_k.
  diff::SmoothMap dyn(4 * n + m, 2 * n, [P, n, m, h, form](auto z) {
    using T = diff::scalar_t<decltype(z)>;
    std::vector<T> Q(n), X(n);
    for (int i = 0; i < n; ++i) {
      Q[i] = 0.5 * (z[i] + z[n + i]);
      X[i] = 0.5 * (z[2 * n + i] + z[3 * n + i]);
    }
    std::vector<T> qdot, xdot;
    stage_field<T>(form, P->sys, CSpan<T>(Q), CSpan<T>(X), z.subspan(4 * n, m), qdot, xdot);
    std::vector<T> r(2 * n);
    for (int i = 0; i < n; ++i) {
      r[i] = (z[n + i] - z[i]) / h - qdot[i];
      r[n + i] = (z[3 * n + i] - z[2 * n + i]) / h - xdot[i];
    }
    return r;
  });
  diff::SmoothMap cost(4 * n + m, 1, [P, n, m, h, form](auto z) {
    using T = diff::scalar_t<decltype(z)>;
    std::vector<T> Q(n), X(n);
    for (int i = 0; i < n; ++i) {
      Q[i] = 0.5 * (z[i] + z[n + i]);
      X[i] = 0.5 * (z[2 * n + i] + z[3 * n + i]);
    }
    std::vector<T> V = form == Form::hamiltonian ? kernels::legendre_inverse<T>(P->sys, CSpan<T>(Q), CSpan<T>(X)) : X;
    auto args = kernels::concat<T>(CSpan<T>(Q), CSpan<T>(V), z.subspan(4 * n, m));
    return std::vector<T>{h * P->C(std::span<const T>(args))[0]};
  });
  for (int k = 0; k < N; ++k) {
    auto vars = join({node_idx(qb, k), node_idx(qb, k + 1), node_idx(xb, k), node_idx(xb, k + 1), node_idx(ub, k)});
    nlp.constraint_elements.push_back({vars, node_idx(rd, k), dyn});
    nlp.objective_terms.push_back({vars, {}, cost});
  }
  detail::add_configuration_rows(nlp, xb, rxN, N, xT);
  detail::add_configuration_rows(nlp, qb, rqN, N, P->qT);
  detail::add_mayer_term(nlp, P, qb);
  nlp.validate();
  nlp.initial_guess = initial_guess(nlp);
  return nlp;
}

}  // namespace

HamiltonianForm hamiltonian_form(const LagrangianSystem& sys_in) {
  sys_in.validate();
  auto sys = std::make_shared<const LagrangianSystem>(sys_in);
  const int n = sys->n, m = sys->m;
  HamiltonianForm hf;
  hf.H = diff::DeepSmoothMap(2 * n, 1, [sys, n](auto z) {
    using T = diff::scalar_t<decltype(z)>;
    if constexpr (diff::depth_v<T> > 2) {
      throw UnsupportedError("H is differentiable at most twice");
      return std::vector<T>{};
    } else {
      return std::vector<T>{kernels::hamiltonian_qp<T>(*sys, z.subspan(0, n), z.subspan(n, n))};
    }
  });
  hf.fH = diff::DeepSmoothMap(2 * n + m, n, [sys, n, m](auto z) {
    using T = diff::scalar_t<decltype(z)>;
    if constexpr (diff::depth_v<T> > 2) {
      // The inverse Legendre transform needs two extra nesting levels.
      throw UnsupportedError("f_H is differentiable at most twice");
      return std::vector<T>{};
    } else {
      std::vector<T> v = kernels::legendre_inverse<T>(*sys, z.subspan(0, n), z.subspan(n, n));
      return kernels::force<T>(*sys, z.subspan(0, n), CSpan<T>(v), z.subspan(2 * n, m));
    }
  });
  return hf;
}

Nlp transcribe_hamiltonian_midpoint(const Ocp& ocp) { return transcribe_first_order(ocp, Form::hamiltonian); }

Nlp transcribe_velocity_midpoint(const Ocp& ocp) { return transcribe_first_order(ocp, Form::velocity); }

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"dmoc", "ham-midpoint", "vel-midpoint"};
  return names;
}

Nlp transcribe_method(const Ocp& ocp, const std::string& method) {
  if (method == "dmoc") return transcribe(ocp);
  if (method == "dmoc-mayer") return to_mayer(ocp);
  if (method == "ham-midpoint") return transcribe_hamiltonian_midpoint(ocp);
  if (method == "vel-midpoint") return transcribe_velocity_midpoint(ocp);
  std::string valid;
  for (const auto& s : method_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw ConfigError("unknown method '" + method + "' (valid: " + valid + ")");
}

SolutionGap compare_solutions(const Nlp& a, const Eigen::VectorXd& xa, const Nlp& b, const Eigen::VectorXd& xb) {
  if (!a.ocp || !b.ocp) throw std::invalid_argument("compare_solutions: transcriptions carry no problem");
  if (a.ocp->N != b.ocp->N) throw DimensionError("compare_solutions: mismatched N");
  if (a.ocp->sys.n != b.ocp->sys.n || a.ocp->sys.m != b.ocp->sys.m) {
    throw DimensionError("compare_solutions: mismatched problem dimensions");
  }
  SolutionGap gap;
  DiscreteTrajectory ta = decode_trajectory(a, xa), tb = decode_trajectory(b, xb);
  std::vector<Vec> va = node_velocities(a, xa), vb = node_velocities(b, xb);
  for (std::size_t k = 0; k < ta.q.size(); ++k) {
    gap.configuration_gap = std::max(gap.configuration_gap, (ta.q[k] - tb.q[k]).lpNorm<Eigen::Infinity>());
    gap.velocity_gap = std::max(gap.velocity_gap, (va[k] - vb[k]).lpNorm<Eigen::Infinity>());
  }
  gap.state_gap = std::max(gap.configuration_gap, gap.velocity_gap);
  for (std::size_t k = 0; k < ta.u.size(); ++k) {
    if (ta.u[k].size() > 0) {
      gap.control_gap = std::max(gap.control_gap, (ta.u[k] - tb.u[k]).lpNorm<Eigen::Infinity>());
    }
  }
  gap.objective_gap = std::fabs(a.objective(xa) - b.objective(xb));
  return gap;
}

}  // namespace dmoc
