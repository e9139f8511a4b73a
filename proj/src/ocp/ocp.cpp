#include "dmoc/ocp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmoc/detail/convert.hpp"
#include "dmoc/discmech/kernels.hpp"
#include "dmoc/errors.hpp"

namespace dmoc {

namespace {

using kernels::CSpan;

bool is_dmoc(const Nlp& nlp) { return nlp.method == "dmoc" || nlp.method == "dmoc-mayer"; }

const Ocp& problem_of(const Nlp& nlp, const char* what) {
  if (!nlp.ocp) throw std::invalid_argument(std::string(what) + ": transcription carries no problem");
  return *nlp.ocp;
}

}  // namespace

void Ocp::validate() const {
  sys.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("Ocp '" + name + "': horizon T must be positive");
  if (N < 2) throw std::invalid_argument("Ocp '" + name + "': N must be at least 2");
  detail::check_size(q0, sys.n, "Ocp", "q0");
  detail::check_size(qdot0, sys.n, "Ocp", "qdot0");
  detail::check_size(qT, sys.n, "Ocp", "qT");
  detail::check_size(qdotT, sys.n, "Ocp", "qdotT");
  if (!C || C.input_dim() != 2 * sys.n + sys.m || C.output_dim() != 1) {
    throw DimensionError("Ocp '" + name + "': running cost must map R^(2n+m) to R");
  }
  if (Phi && (Phi.input_dim() != sys.n || Phi.output_dim() != 1)) {
    throw DimensionError("Ocp '" + name + "': Mayer term must map R^n to R");
  }
  if (final_constraint && final_constraint.input_dim() != 2 * sys.n) {
    throw DimensionError("Ocp '" + name + "': final constraint must take (q_N, p_N)");
  }
}

double discrete_objective(const Ocp& ocp, const DiscreteTrajectory& traj) {
  traj.validate(ocp.sys);
  const int n = ocp.sys.n;
  double J = 0.0;
  for (int k = 0; k < traj.N; ++k) {
    Vec Q = 0.5 * (traj.q[k] + traj.q[k + 1]);
    Vec V = (traj.q[k + 1] - traj.q[k]) / traj.h;
    std::vector<double> args(2 * n + ocp.sys.m);
    for (int i = 0; i < n; ++i) {
      args[i] = Q[i];
      args[n + i] = V[i];
    }
    for (int i = 0; i < ocp.sys.m; ++i) args[2 * n + i] = traj.u[k][i];
    J += traj.h * ocp.C(std::span<const double>(args))[0];
  }
  if (ocp.Phi) {
    auto qN = detail::to_std(traj.q.back());
    J += ocp.Phi(std::span<const double>(qN))[0];
  }
  return J;
}

Eigen::VectorXd pack_guess(const Nlp& nlp, const std::vector<Vec>& q, const std::vector<Vec>& u) {
  const Ocp& P = problem_of(nlp, "pack_guess");
  const int N = P.N;
  if (static_cast<int>(q.size()) != N + 1 || static_cast<int>(u.size()) != N) {
    throw DimensionError("pack_guess: expected N+1 configurations and N controls");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nlp.num_vars);
  const LayoutBlock& qb = nlp.variables.block("q");
  const LayoutBlock& ub = nlp.variables.block("u");
  for (int k = 0; k <= N; ++k) x.segment(qb.index(k, 0), qb.width) = q[k];
  for (int k = 0; k < N; ++k) x.segment(ub.index(k, 0), ub.width) = u[k];
  if (nlp.variables.has("p") || nlp.variables.has("v")) {
    // Same (q, u) guess for every method: first-order variables are the node
    // momenta (or their velocities) that DMOC implies for it.
    const std::vector<Vec> p = node_momenta(P.sys, decode_trajectory(nlp, x));
    const bool mom = nlp.variables.has("p");
    const LayoutBlock& b = nlp.variables.block(mom ? "p" : "v");
    for (int k = 0; k <= N; ++k) {
      x.segment(b.index(k, 0), b.width) = mom ? p[k] : legendre_inverse(P.sys, q[k], p[k]);
    }
  }
  if (nlp.variables.has("z")) {
    // Accumulated running cost of the guess, so the accumulator rows hold.
    DiscreteTrajectory t = decode_trajectory(nlp, x);
    const LayoutBlock& zb = nlp.variables.block("z");
    double acc = 0.0;
    x[zb.index(0, 0)] = 0.0;
    Ocp noPhi = P;
    noPhi.Phi = {};
    for (int k = 0; k < N; ++k) {
      DiscreteTrajectory one{t.h, 1, {t.q[k], t.q[k + 1]}, {t.u[k]}};
      acc += discrete_objective(noPhi, one);
      x[zb.index(k + 1, 0)] = acc;
    }
  }
  return x;
}

Eigen::VectorXd initial_guess(const Nlp& nlp) {
  const Ocp& P = problem_of(nlp, "initial_guess");
  const int N = P.N;
  std::vector<Vec> q(static_cast<std::size_t>(N + 1));
  for (int k = 0; k <= N; ++k) {
    const double s = static_cast<double>(k) / N;
    q[k] = (1.0 - s) * P.q0 + s * P.qT;
  }
  return pack_guess(nlp, q, std::vector<Vec>(static_cast<std::size_t>(N), Vec::Zero(P.sys.m)));
}

DiscreteTrajectory resample(const DiscreteTrajectory& src, int N) {
  if (src.N < 1 || N < 1) throw DimensionError("resample: grids need at least one interval");
  const double T = src.h * src.N;
  DiscreteTrajectory out{T / N, N, {}, {}};
  // q at nodes t_k = k h, u at interval midpoints; linear in between, constant
  // extension of u past the outermost midpoints.
  auto lerp = [](const std::vector<Vec>& v, double pos) {
    const int last = static_cast<int>(v.size()) - 1;
    if (pos <= 0.0) return Vec(v.front());
    if (pos >= last) return Vec(v.back());
    const int i = std::min(static_cast<int>(pos), last - 1);
    const double w = pos - i;
    return Vec((1.0 - w) * v[i] + w * v[i + 1]);
  };
  for (int k = 0; k <= N; ++k) out.q.push_back(lerp(src.q, static_cast<double>(k) * src.N / N));
  for (int k = 0; k < N; ++k) out.u.push_back(lerp(src.u, (k + 0.5) * src.N / N - 0.5));
  return out;
}

std::vector<Vec> decode_nodes(const Nlp& nlp, const Eigen::VectorXd& x, const std::string& block) {
  if (x.size() != nlp.num_vars) throw DimensionError("decode_nodes: vector size mismatch");
  const LayoutBlock& b = nlp.variables.block(block);
  std::vector<Vec> out(static_cast<std::size_t>(b.count));
  for (int k = 0; k < b.count; ++k) out[k] = x.segment(b.index(k, 0), b.width);
  return out;
}

DiscreteTrajectory decode_trajectory(const Nlp& nlp, const Eigen::VectorXd& x) {
  const Ocp& P = problem_of(nlp, "decode_trajectory");
  DiscreteTrajectory t;
  t.h = P.h();
  t.N = P.N;
  t.q = decode_nodes(nlp, x, "q");
  t.u = decode_nodes(nlp, x, "u");
  return t;
}

std::vector<Vec> native_momenta(const Nlp& nlp, const Eigen::VectorXd& x) {
  const Ocp& P = problem_of(nlp, "native_momenta");
  if (is_dmoc(nlp)) return node_momenta(P.sys, decode_trajectory(nlp, x));
  if (nlp.method == "ham-midpoint") return decode_nodes(nlp, x, "p");
  if (nlp.method == "vel-midpoint") {
    auto q = decode_nodes(nlp, x, "q");
    auto v = decode_nodes(nlp, x, "v");
    std::vector<Vec> p(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) p[k] = legendre(P.sys, q[k], v[k]);
    return p;
  }
  throw std::invalid_argument("native_momenta: unsupported method '" + nlp.method + "'");
}

std::vector<Vec> node_velocities(const Nlp& nlp, const Eigen::VectorXd& x) {
  const Ocp& P = problem_of(nlp, "node_velocities");
  if (nlp.method == "vel-midpoint") return decode_nodes(nlp, x, "v");
  auto q = decode_nodes(nlp, x, "q");
  auto p = native_momenta(nlp, x);
  std::vector<Vec> v(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) v[k] = legendre_inverse(P.sys, q[k], p[k]);
  return v;
}

NoetherAudit method_noether_audit(const Nlp& nlp, const Eigen::VectorXd& x, int generator) {
  const Ocp& P = problem_of(nlp, "method_noether_audit");
  DiscreteTrajectory t = decode_trajectory(nlp, x);
  if (is_dmoc(nlp)) return noether_audit(P.sys, t, generator);

  NoetherAudit audit;
  std::vector<Vec> p = native_momenta(nlp, x);
  std::vector<Vec> xs = nlp.method == "ham-midpoint" ? p : decode_nodes(nlp, x, "v");
  const double h = t.h;
  for (int k = 0; k <= t.N; ++k) {
    audit.momenta.push_back(p[k].dot(generator_field(P.sys, t.q[k], generator)));
    audit.scale = std::max(audit.scale, std::fabs(audit.momenta.back()));
  }
  for (int k = 0; k < t.N; ++k) {
    Vec Q = 0.5 * (t.q[k] + t.q[k + 1]);
    Vec X = 0.5 * (xs[k] + xs[k + 1]);
    Vec V = nlp.method == "ham-midpoint" ? legendre_inverse(P.sys, Q, X) : X;
    const double delta = momentum_balance(P.sys, t.q[k], t.q[k + 1], p[k], p[k + 1], V, t.u[k], h, generator);
    auto Qs = detail::to_std(Q), Vs = detail::to_std(V), us = detail::to_std(t.u[k]);
    Vec f = detail::to_eigen(kernels::force<double>(P.sys, CSpan<double>(Qs), CSpan<double>(Vs), CSpan<double>(us)),
                             "method_noether_audit");
    const double forcing =
        0.5 * h * f.dot(generator_field(P.sys, t.q[k], generator) + generator_field(P.sys, t.q[k + 1], generator));
    audit.forcing.push_back(forcing);
    audit.symmetry_breaking.push_back(audit.momenta[k + 1] - audit.momenta[k] - forcing - delta);
    audit.residuals.push_back(delta);
    audit.total += delta;
    audit.max_abs = std::max(audit.max_abs, std::fabs(delta));
    audit.sum_abs += std::fabs(delta);
  }
  return audit;
}

}  // namespace dmoc
