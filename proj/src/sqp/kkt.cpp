#include "dmoc/sqp/kkt.hpp"

#include <dlfcn.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <lapacke.h>

#include "dmoc/errors.hpp"

namespace dmoc::sqp {

namespace {

using sytrf_fn = lapack_int (*)(int, char, lapack_int, double*, lapack_int, lapack_int*);
using sytrs_fn = lapack_int (*)(int, char, lapack_int, lapack_int, const double*, lapack_int, const lapack_int*,
                                double*, lapack_int);

struct Lapacke {
  sytrf_fn sytrf = nullptr;
  sytrs_fn sytrs = nullptr;
};

// LAPACKE is loaded at first use so the BLAS kernel choice can be pinned
// first: OpenBLAS 0.3.20 picks its Cooperlake kernels on AVX512-BF16 CPUs,
// and dsytrf returns wrong factors there once the blocked path is taken
// (n of a few hundred). OpenBLAS reads OPENBLAS_CORETYPE when it is loaded.
// Single-threaded BLAS keeps factorizations bitwise reproducible and leaves
// parallelism to the caller's worker pool; both are overridable from the
// environment.
const Lapacke& lapacke() {
  static const Lapacke api = [] {
    if (std::getenv("OPENBLAS_CORETYPE") == nullptr && __builtin_cpu_supports("avx512bf16")) {
      setenv("OPENBLAS_CORETYPE", "Haswell", 0);
    }
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    void* h = dlopen("liblapacke.so.3", RTLD_NOW | RTLD_LOCAL);
    if (h == nullptr) h = dlopen("liblapacke.so", RTLD_NOW | RTLD_LOCAL);
    if (h == nullptr) throw std::runtime_error(std::string("cannot load LAPACKE: ") + dlerror());
    Lapacke a;
    a.sytrf = reinterpret_cast<sytrf_fn>(dlsym(h, "LAPACKE_dsytrf"));
    a.sytrs = reinterpret_cast<sytrs_fn>(dlsym(h, "LAPACKE_dsytrs"));
    if (a.sytrf == nullptr || a.sytrs == nullptr) throw std::runtime_error("LAPACKE lacks dsytrf/dsytrs");
    return a;
  }();
  return api;
}

void count_eigen_sign(double d, double tol, Inertia& in) {
  if (d > tol) {
    ++in.positive;
  } else if (d < -tol) {
    ++in.negative;
  } else {
    ++in.zero;
  }
}

}  // namespace

void load_lapack() { lapacke(); }

bool KktFactorization::factorize(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, double sigma) {
  n_ = static_cast<int>(H.rows());
  m_ = static_cast<int>(A.rows());
  if (H.cols() != n_ || (m_ > 0 && A.cols() != n_)) throw DimensionError("KKT: inconsistent H/A shapes");
  const int dim = n_ + m_;
  K_.setZero(dim, dim);
  K_.topLeftCorner(n_, n_) = H;
  K_.topLeftCorner(n_, n_).diagonal().array() += sigma;
  if (m_ > 0) {
    K_.bottomLeftCorner(m_, n_) = A;
    K_.topRightCorner(n_, m_) = A.transpose();
  }
  LD_ = K_;
  ipiv_.assign(static_cast<std::size_t>(dim), 0);
  const lapack_int info = lapacke().sytrf(LAPACK_COL_MAJOR, 'L', dim, LD_.data(), dim, ipiv_.data());
  if (info < 0) throw std::runtime_error("KKT: dsytrf argument error");

  inertia_ = {};
  const double tol = 1e-13 * std::max(1.0, K_.lpNorm<Eigen::Infinity>());
  for (int i = 0; i < dim; ++i) {
    if (ipiv_[i] > 0) {
      count_eigen_sign(LD_(i, i), tol, inertia_);
    } else {
      // 2x2 pivot block in rows i, i+1.
      const double a = LD_(i, i), b = LD_(i + 1, i), d = LD_(i + 1, i + 1);
      const double mean = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
      count_eigen_sign(mean + rad, tol, inertia_);
      count_eigen_sign(mean - rad, tol, inertia_);
      ++i;
    }
  }
  return info == 0;
}

bool KktFactorization::inertia_correct() const {
  return inertia_.positive == n_ && inertia_.negative == m_ && inertia_.zero == 0;
}

Eigen::VectorXd KktFactorization::solve(const Eigen::VectorXd& rhs) const {
  const int dim = n_ + m_;
  auto backsolve = [&](Eigen::VectorXd b) {
    const lapack_int info =
        lapacke().sytrs(LAPACK_COL_MAJOR, 'L', dim, 1, LD_.data(), dim, ipiv_.data(), b.data(), dim);
    if (info != 0) throw SingularMatrixError("KKT: dsytrs failed");
    return b;
  };
  Eigen::VectorXd z = backsolve(rhs);
  Eigen::VectorXd r = rhs - K_ * z;
  z += backsolve(r);
  r = rhs - K_ * z;
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  last_residual_ = r.lpNorm<Eigen::Infinity>() / scale;
  if (!z.allFinite() || last_residual_ > 1e-10) {
    Eigen::VectorXd zl = K_.partialPivLu().solve(rhs);
    const double rl = (rhs - K_ * zl).lpNorm<Eigen::Infinity>() / scale;
    if (zl.allFinite() && (rl < last_residual_ || !z.allFinite())) {
      z = zl;
      last_residual_ = rl;
    }
  }
  return z;
}

KktStep kkt_system_solve(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& c, const KktOptions& opts, KktFactorization& fact) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(A.rows());
  if (g.size() != n || c.size() != m) throw DimensionError("kkt_system_solve: inconsistent dimensions");
  KktStep out;
  double sigma = 0.0;
  while (true) {
    const bool nonsingular = fact.factorize(H, A, sigma);
    ++out.factorizations;
    out.work_units += n + m;
    if (nonsingular && fact.inertia_correct()) break;
    sigma = sigma == 0.0 ? std::max(opts.sigma_floor, opts.sigma_start) : sigma * opts.sigma_growth;
    if (sigma > opts.sigma_max) return out;
  }
  Eigen::VectorXd rhs(n + m);
  rhs << -g, -c;
  Eigen::VectorXd z = fact.solve(rhs);
  out.step = z.head(n);
  out.multipliers = -z.tail(m);
  out.sigma = sigma;
  out.ok = true;
  return out;
}

KktStep kkt_system_solve(const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& c, const KktOptions& opts) {
  KktFactorization fact;
  return kkt_system_solve(H, A, g, c, opts, fact);
}

}  // namespace dmoc::sqp
