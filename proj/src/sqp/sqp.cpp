#include "dmoc/sqp/sqp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dmoc/errors.hpp"

namespace dmoc::sqp {

void SqpOptions::validate() const {
  if (!(stationarity_tol > 0) || !(feasibility_tol > 0) || max_iterations <= 0 || !(regularization_floor > 0) ||
      !(sufficient_decrease > 0) || !(min_step > 0) || nonmonotone_window < 0) {
    throw std::invalid_argument("SqpOptions: tolerances and limits must be positive");
  }
  if (!(contraction > 0 && contraction < 1)) throw std::invalid_argument("SqpOptions: contraction must lie in (0, 1)");
  if (!(sufficient_decrease < 0.5)) throw std::invalid_argument("SqpOptions: sufficient decrease must be below 1/2");
}

std::string to_string(SqpStatus s) {
  switch (s) {
    case SqpStatus::converged: return "converged";
    case SqpStatus::max_iter: return "max-iter";
    case SqpStatus::linesearch_failure: return "linesearch-failure";
    case SqpStatus::singular_kkt: return "singular-kkt";
  }
  return "unknown";
}

std::string format_iterate(const SqpIterate& it) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%4d  obj=% .16e  merit=% .16e  stat=%.6e  feas=%.6e  alpha=%.6e  rho=%.6e  sigma=%.1e  fact=%d%s",
                it.iteration, it.objective, it.merit, it.stationarity, it.feasibility, it.step_length, it.penalty,
                it.sigma, it.factorizations, it.soc ? "  soc" : "");
  return buf;
}

double merit(const Nlp& nlp, const Eigen::VectorXd& x, double rho) {
  const double f = nlp.objective(x);
  const double c1 = nlp.num_cons > 0 ? nlp.constraints(x).lpNorm<1>() : 0.0;
  return f + rho * c1;
}

namespace {

// Merit value that treats evaluation failures (e.g. a Legendre inversion that
// diverges far from the current point) as an infinitely bad trial.
double safe_merit(const Nlp& nlp, const Eigen::VectorXd& x, double rho) {
  try {
    const double v = merit(nlp, x, rho);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

LineSearchResult merit_linesearch(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& lambda_plus, double rho, const double curvature,
                                  const SqpOptions& opts, const std::vector<std::pair<double, double>>& history) {
  LineSearchResult out;
  const Eigen::VectorXd g = nlp.gradient(x);
  const double c1 = nlp.num_cons > 0 ? nlp.constraints(x).lpNorm<1>() : 0.0;
  const double gd = g.dot(d);
  if (lambda_plus.size() > 0) rho = std::max(rho, 2.0 * lambda_plus.lpNorm<Eigen::Infinity>());
  if (c1 > 0.0) {
    // Model decrease: ρ‖c‖₁ must dominate gᵀd + ½dᵀHd with margin.
    const double need = (gd + 0.5 * std::max(0.0, curvature)) / (0.5 * c1);
    rho = std::max(rho, need);
  }
  out.penalty = rho;
  out.slope = gd - rho * c1;
  out.merit0 = nlp.objective(x) + rho * c1;
  double ref = out.merit0;
  for (const auto& [f, cn] : history) ref = std::max(ref, f + rho * cn);
  double alpha = 1.0;
  while (alpha >= opts.min_step) {
    const double m = safe_merit(nlp, x + alpha * d, rho);
    ++out.evaluations;
    if (m <= ref + opts.sufficient_decrease * alpha * out.slope) {
      out.alpha = alpha;
      out.merit = m;
      out.accepted = true;
      return out;
    }
    alpha *= opts.contraction;
  }
  out.merit = out.merit0;
  return out;
}

SqpResult solve(const Nlp& nlp, const Eigen::VectorXd& x0, const SqpOptions& opts, const IterationCallback& on_iterate) {
  opts.validate();
  if (x0.size() != nlp.num_vars) throw DimensionError("sqp::solve: initial guess has wrong size");
  if (!x0.allFinite()) throw NonFiniteError("sqp::solve: non-finite initial guess");
  const int n = nlp.num_vars, m = nlp.num_cons;

  SqpResult res;
  res.x = x0;
  res.lambda = Eigen::VectorXd::Zero(m);
  KktOptions kopts;
  kopts.sigma_floor = opts.regularization_floor;
  double rho = 0.0;
  KktFactorization fact;
  std::vector<std::pair<double, double>> history;
  const auto nm = static_cast<std::size_t>(opts.nonmonotone_window);
  double last_sigma = 0.0;

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd g = nlp.gradient(res.x);
    const Eigen::VectorXd c = m > 0 ? nlp.constraints(res.x) : Eigen::VectorXd();
    const Eigen::MatrixXd A = m > 0 ? nlp.jacobian(res.x) : Eigen::MatrixXd(0, n);
    res.objective = nlp.objective(res.x);
    res.stationarity = (m > 0 ? Eigen::VectorXd(g - A.transpose() * res.lambda) : g).lpNorm<Eigen::Infinity>();
    res.feasibility = m > 0 ? c.lpNorm<Eigen::Infinity>() : 0.0;
    res.major_iterations = iter;

    SqpIterate it;
    it.iteration = iter;
    it.objective = res.objective;
    it.stationarity = res.stationarity;
    it.feasibility = res.feasibility;
    it.penalty = rho;
    it.merit = res.objective + rho * (m > 0 ? c.lpNorm<1>() : 0.0);

    if (res.stationarity <= opts.stationarity_tol && res.feasibility <= opts.feasibility_tol) {
      res.status = SqpStatus::converged;
      res.log.push_back(it);
      if (on_iterate) on_iterate(it);
      return res;
    }
    if (iter >= opts.max_iterations) {
      res.status = SqpStatus::max_iter;
      res.log.push_back(it);
      if (on_iterate) on_iterate(it);
      return res;
    }

    const Eigen::MatrixXd H = nlp.lagrangian_hessian(res.x, res.lambda);
    kopts.sigma_start = last_sigma / kopts.sigma_growth;
    KktStep step = kkt_system_solve(H, A, g, c, kopts, fact);
    last_sigma = step.sigma;
    res.minor_iterations += step.factorizations;
    res.work_units += step.work_units;
    it.factorizations = step.factorizations;
    it.sigma = step.sigma;
    if (!step.ok) {
      res.status = SqpStatus::singular_kkt;
      res.log.push_back(it);
      if (on_iterate) on_iterate(it);
      return res;
    }
    // Nonmonotone reference: the Armijo test compares against the worst merit
    // of the last few iterates, re-weighted with the current penalty.
    if (nm > 0) {
      history.emplace_back(res.objective, m > 0 ? c.lpNorm<1>() : 0.0);
      if (history.size() > nm) history.erase(history.begin());
    }
    const Eigen::VectorXd& d = step.step;
    const double curvature = d.dot(H * d) + step.sigma * d.squaredNorm();

    // Full step first; if the merit rejects it, try a second-order correction
    // for the constraint curvature before backtracking.
    LineSearchResult ls;
    bool soc_taken = false;
    Eigen::VectorXd x_new;
    {
      double rho_try = std::max(rho, m > 0 ? 2.0 * step.multipliers.lpNorm<Eigen::Infinity>() : 0.0);
      const double c1 = m > 0 ? c.lpNorm<1>() : 0.0;
      if (c1 > 0.0) rho_try = std::max(rho_try, (g.dot(d) + 0.5 * std::max(0.0, curvature)) / (0.5 * c1));
      double m0 = res.objective + rho_try * c1;
      for (const auto& [f, cn] : history) m0 = std::max(m0, f + rho_try * cn);
      const double slope = g.dot(d) - rho_try * c1;
      const double m_full = safe_merit(nlp, res.x + d, rho_try);
      if (m_full <= m0 + opts.sufficient_decrease * slope) {
        ls.alpha = 1.0;
        ls.penalty = rho_try;
        ls.accepted = true;
        x_new = res.x + d;
      } else if (opts.second_order_correction && m > 0) {
        bool finite = true;
        Eigen::VectorXd c_full;
        try {
          c_full = nlp.constraints(res.x + d);
          finite = c_full.allFinite();
        } catch (const std::exception&) {
          finite = false;
        }
        if (finite) {
          Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
          rhs.tail(m) = -c_full;
          // Reuses the current factorization: no extra minor iteration.
          const Eigen::VectorXd corr = fact.solve(rhs).head(n);
          const Eigen::VectorXd x_soc = res.x + d + corr;
          if (safe_merit(nlp, x_soc, rho_try) <= m0 + opts.sufficient_decrease * slope) {
            ls.alpha = 1.0;
            ls.penalty = rho_try;
            ls.accepted = true;
            soc_taken = true;
            x_new = x_soc;
          }
        }
      }
    }
    if (!ls.accepted) {
      ls = merit_linesearch(nlp, res.x, d, step.multipliers, rho, curvature, opts, history);
      if (ls.accepted) x_new = res.x + ls.alpha * d;
    }
    it.penalty = ls.penalty;
    it.step_length = ls.alpha;
    it.soc = soc_taken;
    res.log.push_back(it);
    if (on_iterate) on_iterate(it);
    if (!ls.accepted) {
      res.status = SqpStatus::linesearch_failure;
      return res;
    }
    rho = ls.penalty;
    res.x = x_new;
    res.lambda += ls.alpha * (step.multipliers - res.lambda);
  }
}

}  // namespace dmoc::sqp
