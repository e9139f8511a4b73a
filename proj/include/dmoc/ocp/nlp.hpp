#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmoc/diff/smooth_map.hpp"

namespace dmoc {

struct Ocp;

/// A contiguous run of equally sized entries, one per node or interval.
struct LayoutBlock {
  std::string name;
  int offset = 0;
  int count = 0;  ///< number of nodes or intervals
  int width = 0;  ///< entries per node or interval
  std::string owner;  ///< "node", "interval" or "global"

  int size() const { return count * width; }
  int index(int k, int i) const { return offset + k * width + i; }
};

/// Describes how a packed vector (variables or constraint rows) decomposes.
struct Layout {
  std::vector<LayoutBlock> blocks;

  int size() const;
  bool has(const std::string& name) const;
  const LayoutBlock& block(const std::string& name) const;
  /// Appends a block at the current end and returns it.
  const LayoutBlock& append(const std::string& name, int count, int width, const std::string& owner);
};

/// A small smooth piece of the problem acting on a subset of variables.
///
/// Objective terms return one value; constraint elements return one value
/// per entry of `rows`, and are summed into those rows (several elements may
/// feed the same row).
struct NlpElement {
  std::vector<int> vars;
  std::vector<int> rows;
  diff::SmoothMap fn;
};

/// Equality-constrained NLP: minimize φ(x) subject to c(x) = 0.
///
/// Derivatives are assembled from per-element forward-mode sweeps; the
/// global maps are available for whole-vector checks.
class Nlp {
 public:
  std::string name;
  std::string method;
  int num_vars = 0;
  int num_cons = 0;
  Layout variables;
  Layout rows;
  std::vector<NlpElement> objective_terms;
  std::vector<NlpElement> constraint_elements;
  Eigen::VectorXd constant_rows;  ///< added to the assembled constraints
  Eigen::VectorXd initial_guess;
  std::shared_ptr<const Ocp> ocp;  ///< originating problem, if any

  /// Single-element NLP from whole-vector maps (constraints may be empty).
  static Nlp from_maps(std::string name, const diff::SmoothMap& objective, const diff::SmoothMap& constraints);

  /// Checks element indices and map shapes against the declared sizes.
  void validate() const;

  double objective(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::VectorXd constraints(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
  /// ∇²φ(x) − Σ_r λ_r ∇²c_r(x).
  Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) const;

  /// Whole-vector maps for finite-difference checks.
  diff::SmoothMap objective_map() const;
  diff::SmoothMap constraint_map() const;
};

struct KktReport {
  double stationarity = 0.0;   ///< ‖∇φ − Aᵀλ‖∞
  double feasibility = 0.0;    ///< ‖c‖∞
  double complementarity = 0.0;  ///< no inequalities: always 0
};

KktReport kkt_check(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

}  // namespace dmoc
