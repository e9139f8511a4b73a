#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dmoc::sqp {

/// Loads LAPACKE now instead of at the first factorization. Call before
/// starting threads that solve: loading adjusts BLAS environment variables.
void load_lapack();

/// Inertia of a symmetric matrix: counts of positive, negative and zero eigenvalues.
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Symmetric indefinite factorization (Bunch-Kaufman) of a KKT matrix
/// [[H + σI, Aᵀ], [A, 0]], with inertia read off the block-diagonal factor.
class KktFactorization {
 public:
  /// Factorizes; returns false if LAPACK reports an exactly singular pivot.
  bool factorize(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, double sigma);

  Inertia inertia() const { return inertia_; }
  /// Inertia (n, m, 0) for n primal and m dual unknowns.
  bool inertia_correct() const;
  /// Solves K z = r with one step of iterative refinement; falls back to LU
  /// if the refined residual stays large.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int dimension() const { return static_cast<int>(K_.rows()); }
  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }

 private:
  Eigen::MatrixXd K_;   // assembled matrix (kept for refinement)
  Eigen::MatrixXd LD_;  // packed factor
  std::vector<int> ipiv_;
  int n_ = 0, m_ = 0;
  Inertia inertia_;
  mutable double last_residual_ = 0.0;
};

struct KktStep {
  Eigen::VectorXd step;        ///< primal step d
  Eigen::VectorXd multipliers; ///< λ⁺ with ∇φ − Aᵀλ⁺ + (H + σI)d = 0
  double sigma = 0.0;          ///< regularization that gave the correct inertia
  int factorizations = 0;
  int work_units = 0;          ///< Σ KKT dimension over factorizations
  bool ok = false;             ///< false: inertia never corrected up to σ_max
};

struct KktOptions {
  double sigma_floor = 1e-8;
  double sigma_growth = 10.0;
  double sigma_max = 1e6;
  /// First nonzero σ tried after σ = 0 fails (clamped below by sigma_floor).
  double sigma_start = 0.0;
};

/// Newton-KKT step for min φ s.t. c = 0: solves
///   (H + σI) d − Aᵀλ⁺ = −g,   A d = −c,
/// trying σ = 0 and then max(σ_floor, σ_start)·growth^j until the inertia is (n, m, 0).
KktStep kkt_system_solve(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& c, const KktOptions& opts = {});

/// Same, reusing the caller's factorization object (kept for second-order corrections).
KktStep kkt_system_solve(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& c, const KktOptions& opts, KktFactorization& fact);

}  // namespace dmoc::sqp
