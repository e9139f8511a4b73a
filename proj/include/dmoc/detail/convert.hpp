#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmoc/errors.hpp"

namespace dmoc::detail {

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v, const char* what) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NonFiniteError(std::string(what) + ": non-finite output");
    out[static_cast<Eigen::Index>(i)] = v[i];
  }
  return out;
}

inline void check_size(const Eigen::VectorXd& v, Eigen::Index expected, const char* what, const char* arg) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": " + arg + " has size " + std::to_string(v.size()) + ", expected " +
                         std::to_string(expected));
  }
}

}  // namespace dmoc::detail
