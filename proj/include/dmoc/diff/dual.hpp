#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

namespace dmoc::diff {

/// Forward-mode dual number a + b·ε with ε² = 0.
///
/// Nesting (Dual<Dual<double>>) yields higher derivatives; the innermost
/// value channel always carries the plain real result.
template <class T>
struct Dual {
  T value{};
  T deriv{};

  constexpr Dual() = default;
  constexpr Dual(const T& v) : value(v), deriv(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(const T& v, const T& d) : value(v), deriv(d) {}
  template <class S>
    requires(std::is_arithmetic_v<S> && !std::is_arithmetic_v<T>)
  constexpr Dual(S v) : value(v), deriv(0.0) {}  // NOLINT(google-explicit-constructor)

  Dual& operator+=(const Dual& o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    *this = *this / o;
    return *this;
  }

  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator-(const Dual& a) { return {-a.value, -a.deriv}; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.value + b.value, a.deriv + b.deriv}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.value - b.value, a.deriv - b.deriv}; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.value * b.value, a.value * b.deriv + a.deriv * b.value};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.value / b.value;
    return {q, (a.deriv - q * b.deriv) / b.value};
  }

  friend Dual operator+(const Dual& a, double s) { return {a.value + s, a.deriv}; }
  friend Dual operator+(double s, const Dual& a) { return {s + a.value, a.deriv}; }
  friend Dual operator-(const Dual& a, double s) { return {a.value - s, a.deriv}; }
  friend Dual operator-(double s, const Dual& a) { return {s - a.value, -a.deriv}; }
  friend Dual operator*(const Dual& a, double s) { return {a.value * s, a.deriv * s}; }
  friend Dual operator*(double s, const Dual& a) { return {s * a.value, s * a.deriv}; }
  friend Dual operator/(const Dual& a, double s) { return {a.value / s, a.deriv / s}; }
  friend Dual operator/(double s, const Dual& a) {
    T q = s / a.value;
    return {q, -q * a.deriv / a.value};
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.value != b.value; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& a) {
    return os << '(' << a.value << " + " << a.deriv << "e)";
  }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

/// Nesting depth: 0 for double, 1 for D1, ...
template <class T>
inline constexpr int depth_v = 0;
template <class T>
inline constexpr int depth_v<Dual<T>> = 1 + depth_v<T>;

inline constexpr double value_of(double x) { return x; }
template <class T>
constexpr double value_of(const Dual<T>& x) {
  return value_of(x.value);
}

inline bool all_finite(double x) { return std::isfinite(x); }
template <class T>
bool all_finite(const Dual<T>& x) {
  return all_finite(x.value) && all_finite(x.deriv);
}

// Elementary functions. The double overloads let generic code call
// diff::sin etc. uniformly for every scalar type.

inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double pow(double x, double p) { return std::pow(x, p); }
inline double abs(double x) { return std::fabs(x); }
inline double atan(double x) { return std::atan(x); }
inline double atan2(double y, double x) { return std::atan2(y, x); }
inline double tanh(double x) { return std::tanh(x); }

template <class T>
Dual<T> sin(const Dual<T>& x) {
  return {sin(x.value), cos(x.value) * x.deriv};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  return {cos(x.value), -sin(x.value) * x.deriv};
}
template <class T>
Dual<T> tan(const Dual<T>& x) {
  T t = tan(x.value);
  return {t, (1.0 + t * t) * x.deriv};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.value);
  return {e, e * x.deriv};
}
template <class T>
Dual<T> log(const Dual<T>& x) {
  return {log(x.value), x.deriv / x.value};
}
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.value);
  return {s, x.deriv / (2.0 * s)};
}
template <class T>
Dual<T> pow(const Dual<T>& x, double p) {
  if (p == 0.0) return Dual<T>(T(1.0));
  return {pow(x.value, p), p * pow(x.value, p - 1.0) * x.deriv};
}
template <class T>
Dual<T> pow(const Dual<T>& x, const Dual<T>& p) {
  return exp(p * log(x));
}
template <class T>
Dual<T> abs(const Dual<T>& x) {
  return value_of(x) < 0.0 ? -x : x;
}
template <class T>
Dual<T> atan(const Dual<T>& x) {
  return {atan(x.value), x.deriv / (1.0 + x.value * x.value)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T r2 = x.value * x.value + y.value * y.value;
  return {atan2(y.value, x.value), (x.value * y.deriv - y.value * x.deriv) / r2};
}
template <class T>
Dual<T> tanh(const Dual<T>& x) {
  T t = tanh(x.value);
  return {t, (1.0 - t * t) * x.deriv};
}

}  // namespace dmoc::diff
