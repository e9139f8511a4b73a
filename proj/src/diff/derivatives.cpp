#include "dmoc/diff/derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmoc::diff {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteError(std::string(what) + ": non-finite value");
}

void require_dim(const SmoothMap& f, Eigen::Index n, const char* what) {
  if (f.input_dim() != n) {
    throw DimensionError(std::string(what) + ": point has size " + std::to_string(n) + ", map expects " +
                         std::to_string(f.input_dim()));
  }
}

void require_scalar(const SmoothMap& f, const char* what) {
  if (f.output_dim() != 1) throw DimensionError(std::string(what) + ": map is not scalar-valued");
}

}  // namespace

Eigen::VectorXd evaluate(const SmoothMap& F, const Eigen::VectorXd& x) {
  require_dim(F, x.size(), "evaluate");
  std::vector<double> xv(x.data(), x.data() + x.size());
  std::vector<double> y = F(std::span<const double>(xv));
  Eigen::VectorXd out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    require_finite(y[i], "evaluate");
    out[static_cast<Eigen::Index>(i)] = y[i];
  }
  return out;
}

double directional_derivative(const SmoothMap& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  require_scalar(f, "directional_derivative");
  require_dim(f, x.size(), "directional_derivative");
  if (v.size() != x.size()) throw DimensionError("directional_derivative: direction size mismatch");
  std::vector<D1> xs(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) xs[i] = D1(x[i], v[i]);
  std::vector<D1> y = f(std::span<const D1>(xs));
  require_finite(y[0].value, "directional_derivative");
  require_finite(y[0].deriv, "directional_derivative");
  return y[0].deriv;
}

Eigen::VectorXd gradient(const SmoothMap& f, const Eigen::VectorXd& x) {
  require_scalar(f, "gradient");
  Eigen::MatrixXd J = jacobian(f, x);
  return J.row(0).transpose();
}

Eigen::MatrixXd jacobian(const SmoothMap& F, const Eigen::VectorXd& x) {
  require_dim(F, x.size(), "jacobian");
  const Eigen::Index n = x.size();
  Eigen::MatrixXd J(F.output_dim(), n);
  std::vector<D1> xs(n);
  for (Eigen::Index i = 0; i < n; ++i) xs[i] = D1(x[i], 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    xs[j].deriv = 1.0;
    std::vector<D1> y = F(std::span<const D1>(xs));
    xs[j].deriv = 0.0;
    for (Eigen::Index i = 0; i < J.rows(); ++i) {
      require_finite(y[i].value, "jacobian");
      require_finite(y[i].deriv, "jacobian");
      J(i, j) = y[i].deriv;
    }
  }
  return J;
}

Eigen::MatrixXd weighted_hessian(const SmoothMap& F, const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  require_dim(F, x.size(), "hessian");
  if (w.size() != F.output_dim()) throw DimensionError("weighted_hessian: weight size mismatch");
  const Eigen::Index n = x.size();
  Eigen::MatrixXd H(n, n);
  std::vector<D2> xs(n);
  for (Eigen::Index k = 0; k < n; ++k) xs[k] = D2(D1(x[k], 0.0), D1(0.0, 0.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    xs[i].deriv.value = 1.0;
    for (Eigen::Index j = i; j < n; ++j) {
      xs[j].value.deriv = 1.0;
      std::vector<D2> y = F(std::span<const D2>(xs));
      xs[j].value.deriv = 0.0;
      double s = 0.0;
      for (Eigen::Index r = 0; r < w.size(); ++r) {
        if (w[r] != 0.0) s += w[r] * y[r].deriv.deriv;
      }
      require_finite(s, "hessian");
      H(i, j) = s;
      H(j, i) = s;
    }
    xs[i].deriv.value = 0.0;
  }
  return H;
}

Eigen::MatrixXd hessian(const SmoothMap& f, const Eigen::VectorXd& x) {
  require_scalar(f, "hessian");
  return weighted_hessian(f, x, Eigen::VectorXd::Ones(1));
}

FdReport fd_check(const SmoothMap& F, const Eigen::VectorXd& x, double tolerance) {
  FdReport rep;
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) *
                   std::max(1.0, x.size() > 0 ? x.lpNorm<Eigen::Infinity>() : 0.0);
  rep.step = h;
  Eigen::MatrixXd J;
  try {
    J = jacobian(F, x);
  } catch (const std::exception& e) {
    rep.note = std::string("jacobian failed: ") + e.what();
    rep.max_rel_deviation = std::numeric_limits<double>::infinity();
    return rep;
  }
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd fp, fm;
    try {
      xp[j] = x[j] + h;
      fp = evaluate(F, xp);
      xp[j] = x[j] - h;
      fm = evaluate(F, xp);
      xp[j] = x[j];
    } catch (const std::exception& e) {
      rep.note = std::string("evaluation failed: ") + e.what();
      rep.max_rel_deviation = std::numeric_limits<double>::infinity();
      rep.worst_col = static_cast<int>(j);
      return rep;
    }
    // Actual step after rounding of x ± h.
    const double denom = (x[j] + h) - (x[j] - h);
    for (Eigen::Index i = 0; i < J.rows(); ++i) {
      const double fd = (fp[i] - fm[i]) / denom;
      const double ad = J(i, j);
      const double dev = std::fabs(ad - fd) / std::max({1.0, std::fabs(ad), std::fabs(fd)});
      if (dev > rep.max_rel_deviation || rep.worst_row < 0) {
        rep.max_rel_deviation = dev;
        rep.worst_row = static_cast<int>(i);
        rep.worst_col = static_cast<int>(j);
        rep.ad_value = ad;
        rep.fd_value = fd;
      }
    }
  }
  rep.pass = rep.max_rel_deviation <= tolerance;
  return rep;
}

}  // namespace dmoc::diff
