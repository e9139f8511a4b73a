#pragma once

#include <functional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "dmoc/diff/dual.hpp"
#include "dmoc/errors.hpp"

namespace dmoc::diff {

template <class T>
using VecFn = std::vector<T>(std::span<const T>);

/// Scalar type carried by a span argument inside a generic callback.
template <class Span>
using scalar_t = std::remove_cv_t<typename std::remove_cvref_t<Span>::element_type>;

/// A map R^in -> R^out whose callback is instantiated for every scalar type in Ts.
///
/// Construct from a generic lambda taking std::span<const T>; each
/// instantiation is stored separately, so no virtual dispatch on the scalar.
template <class... Ts>
class BasicSmoothMap {
 public:
  BasicSmoothMap() = default;

  template <class F>
    requires(!std::is_same_v<std::remove_cvref_t<F>, BasicSmoothMap>)
  BasicSmoothMap(int input_dim, int output_dim, F f)
      : in_(input_dim), out_(output_dim), fns_(std::function<VecFn<Ts>>(f)...), valid_(true) {}

  /// Restrict a map with more scalar instantiations to this one's set.
  template <class... Us>
    requires(sizeof...(Us) > sizeof...(Ts))
  BasicSmoothMap(const BasicSmoothMap<Us...>& other)  // NOLINT(google-explicit-constructor)
      : in_(other.input_dim()),
        out_(other.output_dim()),
        fns_(other.template function<Ts>()...),
        valid_(static_cast<bool>(other)) {}

  int input_dim() const { return in_; }
  int output_dim() const { return out_; }
  explicit operator bool() const { return valid_; }

  template <class T>
  static constexpr bool supports = (std::is_same_v<T, Ts> || ...);

  template <class T>
  const std::function<VecFn<T>>& function() const {
    return std::get<std::function<VecFn<T>>>(fns_);
  }

  template <class T>
  std::vector<T> operator()(std::span<const T> x) const {
    if (!valid_) throw DimensionError("evaluation of an empty smooth map");
    if (static_cast<int>(x.size()) != in_) {
      throw DimensionError("smooth map expects input of size " + std::to_string(in_) + ", got " +
                           std::to_string(x.size()));
    }
    std::vector<T> y = function<T>()(x);
    if (static_cast<int>(y.size()) != out_) {
      throw DimensionError("smooth map callback returned " + std::to_string(y.size()) +
                           " outputs, declared " + std::to_string(out_));
    }
    return y;
  }
  template <class T>
  std::vector<T> operator()(const std::vector<T>& x) const {
    return (*this)(std::span<const T>(x));
  }

 private:
  int in_ = 0;
  int out_ = 0;
  std::tuple<std::function<VecFn<Ts>>...> fns_;
  bool valid_ = false;
};

/// Maps differentiated at most twice (objective, constraints).
using SmoothMap = BasicSmoothMap<double, D1, D2>;
/// Model callbacks: the transcriptions differentiate through Newton solves
/// and mass-matrix solves, so up to fourth-order nesting is needed.
using DeepSmoothMap = BasicSmoothMap<double, D1, D2, D3, D4>;

}  // namespace dmoc::diff
