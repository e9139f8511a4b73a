#include <memory>
#include <string>

#include "dmoc/discmech/kernels.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/ocp/ocp.hpp"
#include "dmoc/ocp/transcription_parts.hpp"

namespace dmoc {

namespace {

using kernels::CSpan;

std::vector<int> node_indices(const LayoutBlock& b, int k) {
  std::vector<int> idx(static_cast<std::size_t>(b.width));
  for (int i = 0; i < b.width; ++i) idx[static_cast<std::size_t>(i)] = b.index(k, i);
  return idx;
}

std::vector<int> join(std::initializer_list<std::vector<int>> parts) {
  std::vector<int> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

/// h·C(Q, V, u) on local variables (q0, q1, u).
diff::SmoothMap midpoint_cost(const std::shared_ptr<const Ocp>& P) {
  const int n = P->sys.n, m = P->sys.m;
  const double h = P->h();
  return diff::SmoothMap(2 * n + m, 1, [P, n, m, h](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    std::vector<T> Q, V;
    kernels::midpoint<T>(x.subspan(0, n), x.subspan(n, n), h, Q, V);
    auto args = kernels::concat<T>(CSpan<T>(Q), CSpan<T>(V), x.subspan(2 * n, m));
    return std::vector<T>{h * P->C(std::span<const T>(args))[0]};
  });
}

diff::SmoothMap offset_map(int n, const Vec& target) {
  return diff::SmoothMap(n, n, [target](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    std::vector<T> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - target[static_cast<Eigen::Index>(i)];
    return r;
  });
}

}  // namespace

namespace detail {

// Shared by the baselines: boundary configuration rows and cost terms.
void add_configuration_rows(Nlp& nlp, const LayoutBlock& qb, const LayoutBlock& rb, int node, const Vec& target) {
  nlp.constraint_elements.push_back({node_indices(qb, node), node_indices(rb, 0), offset_map(qb.width, target)});
}

void add_running_cost(Nlp& nlp, const std::shared_ptr<const Ocp>& P, const LayoutBlock& qb, const LayoutBlock& ub) {
  diff::SmoothMap cost = midpoint_cost(P);
  for (int k = 0; k < P->N; ++k) {
    nlp.objective_terms.push_back(
        {join({node_indices(qb, k), node_indices(qb, k + 1), node_indices(ub, k)}), {}, cost});
  }
}

void add_mayer_term(Nlp& nlp, const std::shared_ptr<const Ocp>& P, const LayoutBlock& qb) {
  if (!P->Phi) return;
  diff::SmoothMap phi = P->Phi;
  nlp.objective_terms.push_back({node_indices(qb, P->N), {}, phi});
}

std::vector<int> node_idx(const LayoutBlock& b, int k) { return node_indices(b, k); }

}  // namespace detail

Nlp transcribe(const Ocp& ocp_in) {
  ocp_in.validate();
  if (ocp_in.path_constraints || ocp_in.control_bounds) {
    throw UnsupportedError("transcribe: inequality path or control constraints are not supported");
  }
  auto P = std::make_shared<const Ocp>(ocp_in);
  const int n = P->sys.n, m = P->sys.m, N = P->N;
  const double h = P->h();
  const bool hook = static_cast<bool>(P->final_constraint);

  Nlp nlp;
  nlp.name = P->name + "/dmoc";
  nlp.method = "dmoc";
  nlp.ocp = P;
  const LayoutBlock qb = nlp.variables.append("q", N + 1, n, "node");
  const LayoutBlock ub = nlp.variables.append("u", N, m, "interval");
  nlp.num_vars = nlp.variables.size();

  const LayoutBlock r0 = nlp.rows.append("q0", 1, n, "node");
  const LayoutBlock rp = nlp.rows.append("momentum", hook ? N : N + 1, n, "node");
  const LayoutBlock rf = hook ? nlp.rows.append("final", 1, P->final_constraint.output_dim(), "node")
                              : nlp.rows.append("qN", 1, n, "node");
  nlp.num_cons = nlp.rows.size();
  nlp.constant_rows = Eigen::VectorXd::Zero(nlp.num_cons);

  detail::add_configuration_rows(nlp, qb, r0, 0, P->q0);

  const Vec p0 = legendre(P->sys, P->q0, P->qdot0);
  for (int i = 0; i < n; ++i) nlp.constant_rows[rp.index(0, i)] = p0[i] / h;

  // Step element: (D1 L_d + f⁻, D2 L_d + f⁺)/h feeding the rows of both nodes.
  diff::SmoothMap step(2 * n + m, 2 * n, [P, n, m, h](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    std::vector<T> left, right;
    kernels::step_contributions<T>(P->sys, x.subspan(0, n), x.subspan(n, n), x.subspan(2 * n, m), h, left, right);
    left.insert(left.end(), right.begin(), right.end());
    for (auto& v : left) v = v / h;
    return left;
  });
  diff::SmoothMap left_only(2 * n + m, n, [P, n, m, h](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    std::vector<T> left, right;
    kernels::step_contributions<T>(P->sys, x.subspan(0, n), x.subspan(n, n), x.subspan(2 * n, m), h, left, right);
    for (auto& v : left) v = v / h;
    return left;
  });
  for (int k = 0; k < N; ++k) {
    auto vars = join({node_indices(qb, k), node_indices(qb, k + 1), node_indices(ub, k)});
    if (hook && k == N - 1) {
      nlp.constraint_elements.push_back({vars, node_indices(rp, k), left_only});
    } else {
      nlp.constraint_elements.push_back({vars, join({node_indices(rp, k), node_indices(rp, k + 1)}), step});
    }
  }

  if (hook) {
    const int nr = P->final_constraint.output_dim();
    diff::SmoothMap fin(2 * n + m, nr, [P, n, m, h](auto x) {
      using T = diff::scalar_t<decltype(x)>;
      std::vector<T> pN =
          kernels::dlegendre_plus<T>(P->sys, x.subspan(0, n), x.subspan(n, n), x.subspan(2 * n, m), h);
      auto args = kernels::concat<T>(x.subspan(n, n), CSpan<T>(pN));
      return P->final_constraint(std::span<const T>(args));
    });
    nlp.constraint_elements.push_back(
        {join({node_indices(qb, N - 1), node_indices(qb, N), node_indices(ub, N - 1)}), node_indices(rf, 0), fin});
  } else {
    const Vec pT = legendre(P->sys, P->qT, P->qdotT);
    for (int i = 0; i < n; ++i) nlp.constant_rows[rp.index(N, i)] = -pT[i] / h;
    detail::add_configuration_rows(nlp, qb, rf, N, P->qT);
  }

  detail::add_running_cost(nlp, P, qb, ub);
  detail::add_mayer_term(nlp, P, qb);
  nlp.validate();
  nlp.initial_guess = initial_guess(nlp);
  return nlp;
}

Nlp to_mayer(const Ocp& ocp) {
  Nlp nlp = transcribe(ocp);
  auto P = nlp.ocp;
  const int n = P->sys.n, m = P->sys.m, N = P->N;
  nlp.name = P->name + "/dmoc-mayer";
  nlp.method = "dmoc-mayer";
  const LayoutBlock qb = nlp.variables.block("q");
  const LayoutBlock ub = nlp.variables.block("u");
  const LayoutBlock zb = nlp.variables.append("z", N + 1, 1, "node");
  nlp.num_vars = nlp.variables.size();
  const LayoutBlock rz0 = nlp.rows.append("z0", 1, 1, "node");
  const LayoutBlock rz = nlp.rows.append("accumulate", N, 1, "interval");
  nlp.num_cons = nlp.rows.size();
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(nlp.num_cons);
  c0.head(nlp.constant_rows.size()) = nlp.constant_rows;
  nlp.constant_rows = c0;

  nlp.constraint_elements.push_back({{zb.index(0, 0)}, {rz0.index(0, 0)}, offset_map(1, Vec::Zero(1))});
  diff::SmoothMap cost = midpoint_cost(P);
  diff::SmoothMap acc(2 * n + m + 2, 1, [cost, n, m](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    T c = cost(x.subspan(0, 2 * n + m))[0];
    return std::vector<T>{x[2 * n + m + 1] - x[2 * n + m] - c};
  });
  for (int k = 0; k < N; ++k) {
    nlp.constraint_elements.push_back({join({node_indices(qb, k), node_indices(qb, k + 1), node_indices(ub, k),
                                             {zb.index(k, 0), zb.index(k + 1, 0)}}),
                                       {rz.index(k, 0)},
                                       acc});
  }
  nlp.objective_terms.clear();
  diff::SmoothMap last(1, 1, [](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    return std::vector<T>{x[0]};
  });
  nlp.objective_terms.push_back({{zb.index(N, 0)}, {}, last});
  detail::add_mayer_term(nlp, P, qb);
  nlp.validate();
  nlp.initial_guess = initial_guess(nlp);
  return nlp;
}

}  // namespace dmoc
