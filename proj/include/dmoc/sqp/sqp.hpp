#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmoc/ocp/nlp.hpp"
#include "dmoc/sqp/kkt.hpp"

namespace dmoc::sqp {

struct SqpOptions {
  double stationarity_tol = 1e-8;
  double feasibility_tol = 1e-10;
  int max_iterations = 200;
  double regularization_floor = 1e-8;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  double min_step = 1e-10;
  bool second_order_correction = true;
  /// Armijo reference is the max merit over this many previous iterates (0: monotone).
  int nonmonotone_window = 10;

  /// Throws std::invalid_argument on non-positive values or contraction outside (0, 1).
  void validate() const;
};

enum class SqpStatus { converged, max_iter, linesearch_failure, singular_kkt };

std::string to_string(SqpStatus s);

/// One line of the iteration log.
struct SqpIterate {
  int iteration = 0;
  double objective = 0.0;
  double merit = 0.0;
  double stationarity = 0.0;
  double feasibility = 0.0;
  double step_length = 0.0;
  double penalty = 0.0;
  double sigma = 0.0;
  int factorizations = 0;
  bool soc = false;
};

/// Fixed-width text form of an iterate (bitwise reproducible given the inputs).
std::string format_iterate(const SqpIterate& it);

struct SqpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  SqpStatus status = SqpStatus::max_iter;
  int major_iterations = 0;
  int minor_iterations = 0;  ///< KKT factorizations
  long work_units = 0;       ///< Σ KKT dimension over factorizations
  double stationarity = 0.0;
  double feasibility = 0.0;
  double objective = 0.0;
  std::vector<SqpIterate> log;
};

struct LineSearchResult {
  double alpha = 0.0;
  double penalty = 0.0;
  double merit0 = 0.0;     ///< merit at α = 0
  double merit = 0.0;      ///< merit at the accepted α
  double slope = 0.0;      ///< directional derivative of the merit along d
  int evaluations = 0;
  bool accepted = false;
};

/// ℓ1 merit φ(x) + ρ‖c(x)‖₁.
double merit(const Nlp& nlp, const Eigen::VectorXd& x, double rho);

/// Raises ρ to at least 2‖λ⁺‖∞ and far enough that d is a descent direction
/// of the merit; backtracks by `contraction` until the Armijo condition holds.
/// `curvature` is dᵀHd (only its positive part is used in the penalty bound).
/// `history` holds (φ, ‖c‖₁) of recent iterates for a nonmonotone reference.
LineSearchResult merit_linesearch(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& lambda_plus, double rho, double curvature,
                                  const SqpOptions& opts, const std::vector<std::pair<double, double>>& history = {});

using IterationCallback = std::function<void(const SqpIterate&)>;

/// Equality-constrained SQP with exact Lagrangian Hessians and inertia-corrected
/// dense KKT solves.
SqpResult solve(const Nlp& nlp, const Eigen::VectorXd& x0, const SqpOptions& opts = {},
                const IterationCallback& on_iterate = {});

}  // namespace dmoc::sqp
