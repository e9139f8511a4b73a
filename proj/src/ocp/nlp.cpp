#include "dmoc/ocp/nlp.hpp"

#include <cmath>
#include <stdexcept>

#include "dmoc/diff/derivatives.hpp"
#include "dmoc/errors.hpp"

namespace dmoc {

int Layout::size() const {
  int s = 0;
  for (const auto& b : blocks) s += b.size();
  return s;
}

bool Layout::has(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return true;
  return false;
}

const LayoutBlock& Layout::block(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw std::out_of_range("layout has no block named '" + name + "'");
}

const LayoutBlock& Layout::append(const std::string& name, int count, int width, const std::string& owner) {
  LayoutBlock b{name, size(), count, width, owner};
  blocks.push_back(b);
  return blocks.back();
}

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
  return out;
}

template <class T>
std::vector<T> gather_t(std::span<const T> x, const std::vector<int>& idx) {
  std::vector<T> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = x[static_cast<std::size_t>(idx[i])];
  return out;
}

}  // namespace

Nlp Nlp::from_maps(std::string name, const diff::SmoothMap& objective, const diff::SmoothMap& constraints) {
  Nlp nlp;
  nlp.name = std::move(name);
  nlp.method = "generic";
  nlp.num_vars = objective.input_dim();
  nlp.variables.append("x", 1, nlp.num_vars, "global");
  std::vector<int> all(static_cast<std::size_t>(nlp.num_vars));
  for (int i = 0; i < nlp.num_vars; ++i) all[static_cast<std::size_t>(i)] = i;
  nlp.objective_terms.push_back({all, {}, objective});
  if (constraints && constraints.output_dim() > 0) {
    nlp.num_cons = constraints.output_dim();
    nlp.rows.append("c", 1, nlp.num_cons, "global");
    std::vector<int> rows(static_cast<std::size_t>(nlp.num_cons));
    for (int i = 0; i < nlp.num_cons; ++i) rows[static_cast<std::size_t>(i)] = i;
    nlp.constraint_elements.push_back({all, rows, constraints});
  }
  nlp.constant_rows = Eigen::VectorXd::Zero(nlp.num_cons);
  nlp.initial_guess = Eigen::VectorXd::Zero(nlp.num_vars);
  nlp.validate();
  return nlp;
}

void Nlp::validate() const {
  if (variables.size() != num_vars) throw DimensionError("Nlp '" + name + "': variable layout size mismatch");
  if (rows.size() != num_cons) throw DimensionError("Nlp '" + name + "': row layout size mismatch");
  if (constant_rows.size() != num_cons) throw DimensionError("Nlp '" + name + "': constant row size mismatch");
  auto check = [&](const NlpElement& e, bool objective) {
    if (e.fn.input_dim() != static_cast<int>(e.vars.size())) {
      throw DimensionError("Nlp '" + name + "': element input size mismatch");
    }
    const int outs = objective ? 1 : static_cast<int>(e.rows.size());
    if (e.fn.output_dim() != outs) throw DimensionError("Nlp '" + name + "': element output size mismatch");
    for (int v : e.vars)
      if (v < 0 || v >= num_vars) throw DimensionError("Nlp '" + name + "': element variable out of range");
    for (int r : e.rows)
      if (r < 0 || r >= num_cons) throw DimensionError("Nlp '" + name + "': element row out of range");
  };
  for (const auto& e : objective_terms) check(e, true);
  for (const auto& e : constraint_elements) check(e, false);
}

double Nlp::objective(const Eigen::VectorXd& x) const {
  double f = 0.0;
  for (const auto& e : objective_terms) f += diff::evaluate(e.fn, gather(x, e.vars))[0];
  return f;
}

Eigen::VectorXd Nlp::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(num_vars);
  for (const auto& e : objective_terms) {
    Eigen::MatrixXd J = diff::jacobian(e.fn, gather(x, e.vars));
    for (std::size_t j = 0; j < e.vars.size(); ++j) g[e.vars[j]] += J(0, static_cast<Eigen::Index>(j));
  }
  return g;
}

Eigen::VectorXd Nlp::constraints(const Eigen::VectorXd& x) const {
  Eigen::VectorXd c = constant_rows;
  for (const auto& e : constraint_elements) {
    Eigen::VectorXd y = diff::evaluate(e.fn, gather(x, e.vars));
    for (std::size_t i = 0; i < e.rows.size(); ++i) c[e.rows[i]] += y[static_cast<Eigen::Index>(i)];
  }
  return c;
}

Eigen::MatrixXd Nlp::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(num_cons, num_vars);
  for (const auto& e : constraint_elements) {
    Eigen::MatrixXd J = diff::jacobian(e.fn, gather(x, e.vars));
    for (std::size_t i = 0; i < e.rows.size(); ++i)
      for (std::size_t j = 0; j < e.vars.size(); ++j)
        A(e.rows[i], e.vars[j]) += J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return A;
}

Eigen::MatrixXd Nlp::lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) const {
  if (lambda.size() != num_cons) throw DimensionError("Nlp::lagrangian_hessian: multiplier size mismatch");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(num_vars, num_vars);
  auto add = [&](const NlpElement& e, const Eigen::MatrixXd& H) {
    for (std::size_t i = 0; i < e.vars.size(); ++i)
      for (std::size_t j = 0; j < e.vars.size(); ++j)
        W(e.vars[i], e.vars[j]) += H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  for (const auto& e : objective_terms) add(e, diff::hessian(e.fn, gather(x, e.vars)));
  for (const auto& e : constraint_elements) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(e.rows.size()));
    bool any = false;
    for (std::size_t i = 0; i < e.rows.size(); ++i) {
      w[static_cast<Eigen::Index>(i)] = -lambda[e.rows[i]];
      any = any || lambda[e.rows[i]] != 0.0;
    }
    if (any) add(e, diff::weighted_hessian(e.fn, gather(x, e.vars), w));
  }
  return W;
}

diff::SmoothMap Nlp::objective_map() const {
  auto terms = std::make_shared<const std::vector<NlpElement>>(objective_terms);
  return diff::SmoothMap(num_vars, 1, [terms](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    T f(0.0);
    for (const auto& e : *terms) {
      std::vector<T> loc = gather_t<T>(x, e.vars);
      f += e.fn(std::span<const T>(loc))[0];
    }
    return std::vector<T>{f};
  });
}

diff::SmoothMap Nlp::constraint_map() const {
  auto elems = std::make_shared<const std::vector<NlpElement>>(constraint_elements);
  auto offset = std::make_shared<const Eigen::VectorXd>(constant_rows);
  const int m = num_cons;
  return diff::SmoothMap(num_vars, num_cons, [elems, offset, m](auto x) {
    using T = diff::scalar_t<decltype(x)>;
    std::vector<T> c(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(i)] = T((*offset)[i]);
    for (const auto& e : *elems) {
      std::vector<T> loc = gather_t<T>(x, e.vars);
      std::vector<T> y = e.fn(std::span<const T>(loc));
      for (std::size_t i = 0; i < e.rows.size(); ++i) c[static_cast<std::size_t>(e.rows[i])] += y[i];
    }
    return c;
  });
}

KktReport kkt_check(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  if (x.size() != nlp.num_vars) throw DimensionError("kkt_check: point size mismatch");
  if (lambda.size() != nlp.num_cons) throw DimensionError("kkt_check: multiplier size mismatch");
  KktReport r;
  Eigen::VectorXd g = nlp.gradient(x);
  if (nlp.num_cons > 0) {
    g -= nlp.jacobian(x).transpose() * lambda;
    r.feasibility = nlp.constraints(x).lpNorm<Eigen::Infinity>();
  }
  r.stationarity = g.size() > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
  return r;
}

}  // namespace dmoc
