#include <cmath>
#include <stdexcept>

#include "dmoc/baselines/kernels.hpp"
#include "dmoc/detail/convert.hpp"
#include "dmoc/discmech/kernels.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/ocp/ocp.hpp"

namespace dmoc {

namespace {

using diff::D1;
using diff::Dual;
using kernels::CSpan;

enum class Field { hamiltonian, velocity };

/// Stage data of the first-order midpoint form on interval k: the Jacobian of
/// the field F(X, u) at the stage X and the gradient of the stage cost C̃(X, u).
struct Stage {
  Mat J;
  Vec grad_cost;
};

template <class T>
void field(Field kind, const LagrangianSystem& sys, CSpan<T> X, CSpan<T> u, std::vector<T>& F) {
  const std::size_t n = X.size() / 2;
  std::vector<T> a, b;
  if (kind == Field::hamiltonian) {
    kernels::hamiltonian_field<T>(sys, X.subspan(0, n), X.subspan(n, n), u, a, b);
  } else {
    kernels::velocity_field<T>(sys, X.subspan(0, n), X.subspan(n, n), u, a, b);
  }
  F = a;
  F.insert(F.end(), b.begin(), b.end());
}

template <class T>
T stage_cost(Field kind, const Ocp& P, CSpan<T> X, CSpan<T> u) {
  const std::size_t n = X.size() / 2;
  std::vector<T> V = kind == Field::hamiltonian ? kernels::legendre_inverse<T>(P.sys, X.subspan(0, n), X.subspan(n, n))
                                                : std::vector<T>(X.begin() + n, X.end());
  auto args = kernels::concat<T>(X.subspan(0, n), CSpan<T>(V), u);
  return P.C(std::span<const T>(args))[0];
}

Stage stage_data(Field kind, const Ocp& P, const Vec& Xv, const Vec& uv) {
  auto X = detail::to_std(Xv), u = detail::to_std(uv);
  auto uD = kernels::lift<D1>(CSpan<double>(u));
  auto J = diff::jacobian_t<double>(
      [&](CSpan<D1> x) {
        std::vector<D1> F;
        field<D1>(kind, P.sys, x, CSpan<D1>(uD), F);
        return F;
      },
      CSpan<double>(X));
  auto g = diff::gradient_t<double>([&](CSpan<D1> x) { return stage_cost<D1>(kind, P, x, CSpan<D1>(uD)); },
                                    CSpan<double>(X));
  Stage s;
  s.J = Mat(J.rows, J.cols);
  for (int i = 0; i < J.rows; ++i)
    for (int j = 0; j < J.cols; ++j) s.J(i, j) = J(i, j);
  s.grad_cost = detail::to_eigen(g, "extract_adjoints");
  return s;
}

/// Interval multipliers of the (q, p) midpoint form implied by the DMOC
/// node-row multipliers μ_k. With E_k = (p_k + D1 L_d + f⁻, −p_{k+1} + D2 L_d + f⁺)
/// the DMOC rows are sums of E-blocks, so E_k carries (μ_k, μ_{k+1}); the
/// collocation residual G_k vanishes on the same set, and ν_k solves
/// ∂G_kᵀ ν_k = ∂E_kᵀ ε_k + ∇(C̃_k − C_k) (consistent at feasible points).
Vec dmoc_interval_multiplier(const Ocp& P, const Vec& q0, const Vec& q1, const Vec& p0, const Vec& p1, const Vec& u,
                             const Vec& mu0, const Vec& mu1) {
  const int n = P.sys.n, m = P.sys.m;
  const double h = P.h();
  Vec z(4 * n + m);
  z << q0, q1, p0, p1, u;
  auto zs = detail::to_std(z);
  auto G = [&](CSpan<D1> x) {
    std::vector<D1> Q(n), X(n), qd, pd;
    for (int i = 0; i < n; ++i) {
      Q[i] = 0.5 * (x[i] + x[n + i]);
      X[i] = 0.5 * (x[2 * n + i] + x[3 * n + i]);
    }
    kernels::hamiltonian_field<D1>(P.sys, CSpan<D1>(Q), CSpan<D1>(X), x.subspan(4 * n, m), qd, pd);
    std::vector<D1> r(2 * n);
    for (int i = 0; i < n; ++i) {
      r[i] = x[n + i] - x[i] - h * qd[i];
      r[n + i] = x[3 * n + i] - x[2 * n + i] - h * pd[i];
    }
    return r;
  };
  auto E = [&](CSpan<D1> x) {
    std::vector<D1> left, right;
    kernels::step_contributions<D1>(P.sys, x.subspan(0, n), x.subspan(n, n), x.subspan(4 * n, m), h, left, right);
    std::vector<D1> r(2 * n);
    for (int i = 0; i < n; ++i) {
      r[i] = x[2 * n + i] + left[i];
      r[n + i] = -x[3 * n + i] + right[i];
    }
    return r;
  };
  auto D = [&](CSpan<D1> x) {
    std::vector<D1> Q(n), Pm(n), Vd(n);
    for (int i = 0; i < n; ++i) {
      Q[i] = 0.5 * (x[i] + x[n + i]);
      Pm[i] = 0.5 * (x[2 * n + i] + x[3 * n + i]);
      Vd[i] = (x[n + i] - x[i]) / h;
    }
    std::vector<D1> Vh = kernels::legendre_inverse<D1>(P.sys, CSpan<D1>(Q), CSpan<D1>(Pm));
    auto a = kernels::concat<D1>(CSpan<D1>(Q), CSpan<D1>(Vh), x.subspan(4 * n, m));
    auto b = kernels::concat<D1>(CSpan<D1>(Q), CSpan<D1>(Vd), x.subspan(4 * n, m));
    return h * (P.C(std::span<const D1>(a))[0] - P.C(std::span<const D1>(b))[0]);
  };
  auto JG = diff::jacobian_t<double>(G, CSpan<double>(zs));
  auto JE = diff::jacobian_t<double>(E, CSpan<double>(zs));
  auto gD = diff::gradient_t<double>(D, CSpan<double>(zs));
  Mat A(4 * n + m, 2 * n);
  Vec rhs = Vec::Zero(4 * n + m);
  Vec eps(2 * n);
  eps << mu0, mu1;
  for (int j = 0; j < 4 * n + m; ++j) {
    for (int i = 0; i < 2 * n; ++i) {
      A(j, i) = JG(i, j);
      rhs[j] += JE(i, j) * eps[i];
    }
    rhs[j] += gD[j];
  }
  return A.colPivHouseholderQr().solve(rhs);
}

}  // namespace

AdjointExtract extract_adjoints(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  if (!nlp.ocp) throw std::invalid_argument("extract_adjoints: transcription carries no problem");
  const Ocp& P = *nlp.ocp;
  if (x.size() != nlp.num_vars) throw DimensionError("extract_adjoints: solution size mismatch");
  if (lambda.size() != nlp.num_cons) {
    throw DimensionError("extract_adjoints: multiplier/constraint misalignment (" + std::to_string(lambda.size()) +
                         " multipliers for " + std::to_string(nlp.num_cons) + " rows)");
  }
  const int n = P.sys.n, N = P.N;
  const double h = P.h();
  if (N < 2) throw std::invalid_argument("extract_adjoints: N must be at least 2");

  const bool dmoc = nlp.method == "dmoc" || nlp.method == "dmoc-mayer";
  const Field kind = nlp.method == "vel-midpoint" ? Field::velocity : Field::hamiltonian;
  DiscreteTrajectory t = decode_trajectory(nlp, x);
  std::vector<Vec> second = nlp.method == "vel-midpoint" ? decode_nodes(nlp, x, "v") : native_momenta(nlp, x);

  std::vector<Vec> nu(static_cast<std::size_t>(N));
  if (dmoc) {
    if (!nlp.rows.has("momentum") || nlp.rows.block("momentum").count != N + 1) {
      throw DimensionError("extract_adjoints: expected N+1 node momentum rows (fixed final state)");
    }
    const LayoutBlock& rp = nlp.rows.block("momentum");
    std::vector<Vec> mu(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) mu[k] = lambda.segment(rp.index(k, 0), n) / h;
    for (int k = 0; k < N; ++k) {
      nu[k] = dmoc_interval_multiplier(P, t.q[k], t.q[k + 1], second[k], second[k + 1], t.u[k], mu[k], mu[k + 1]);
    }
  } else {
    if (!nlp.rows.has("dynamics")) throw DimensionError("extract_adjoints: no dynamics rows in layout");
    const LayoutBlock& rd = nlp.rows.block("dynamics");
    if (rd.count != N || rd.width != 2 * n) throw DimensionError("extract_adjoints: dynamics rows misaligned");
    for (int k = 0; k < N; ++k) nu[k] = lambda.segment(rd.index(k, 0), 2 * n) / h;
  }

  // Φ_k = −J_kᵀ ν_k − ∇C̃_k; node costates ψ_{k+1} = ψ_k + h·b·Φ_k and the
  // stage relation ν_k = ψ_k + h·ā·Φ_k.
  std::vector<Vec> Phi(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    Vec X(2 * n);
    X << 0.5 * (t.q[k] + t.q[k + 1]), 0.5 * (second[k] + second[k + 1]);
    Stage s = stage_data(kind, P, X, t.u[k]);
    Phi[k] = -s.J.transpose() * nu[k] - s.grad_cost;
  }
  const double a_bar = 0.5, b = 1.0;
  AdjointExtract out;
  out.psi.resize(static_cast<std::size_t>(N) + 1);
  out.psi[0] = nu[0] - h * a_bar * Phi[0];
  for (int k = 0; k < N; ++k) out.psi[k + 1] = out.psi[k] + h * b * Phi[k];
  for (int k = 1; k < N; ++k) {
    const double r = (nu[k] - out.psi[k] - h * a_bar * Phi[k]).lpNorm<Eigen::Infinity>();
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }
  for (const auto& p : out.psi) out.scale = std::max(out.scale, p.lpNorm<Eigen::Infinity>());
  return out;
}

}  // namespace dmoc
