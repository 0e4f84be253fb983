#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace helixlab {

/// Forward-mode dual number with N infinitesimal directions. Nesting
/// (Dual<Dual<double, 1>, 1>) yields exact second derivatives.
template <class T, std::size_t N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  Dual(T value, const std::array<T, N>& deriv) : v(value), d(deriv) {}

  /// Seed an active variable: value x with unit derivative along `dir`.
  static Dual variable(T x, std::size_t dir) {
    Dual r(x, {});
    r.d[dir] = T(1.0);
    return r;
  }
};

inline double value_of(double x) { return x; }
template <class T, std::size_t N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.v);
}

inline bool is_zero(double x) { return x == 0.0; }
template <class T, std::size_t N>
bool is_zero(const Dual<T, N>& x) {
  if (!is_zero(x.v)) return false;
  for (const auto& di : x.d)
    if (!is_zero(di)) return false;
  return true;
}

inline bool has_derivative(double) { return false; }
template <class T, std::size_t N>
bool has_derivative(const Dual<T, N>& x) {
  for (const auto& di : x.d)
    if (!is_zero(di)) return true;
  return has_derivative(x.v);
}

inline bool is_finite(double x) { return std::isfinite(x); }
template <class T, std::size_t N>
bool is_finite(const Dual<T, N>& x) {
  if (!is_finite(x.v)) return false;
  for (const auto& di : x.d)
    if (!is_finite(di)) return false;
  return true;
}

/// f(x) given f(x.v) and f'(x.v). Directions with zero seed stay exactly zero
/// even when f' is infinite.
template <class T, std::size_t N>
Dual<T, N> chain(const Dual<T, N>& x, const T& f, const T& fprime) {
  Dual<T, N> r(f, {});
  for (std::size_t i = 0; i < N; ++i)
    if (!is_zero(x.d[i])) r.d[i] = fprime * x.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r(a.v + b.v, {});
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r(a.v - b.v, {});
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r(-a.v, {});
  for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r(a.v * b.v, {});
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  const T q = a.v / b.v;
  Dual<T, N> r(q, {});
  for (std::size_t i = 0; i < N; ++i) r.d[i] = (a.d[i] - q * b.d[i]) / b.v;
  return r;
}

template <class T, std::size_t N>
Dual<T, N> sin(const Dual<T, N>& x) {
  using std::cos;
  using std::sin;
  return chain(x, T(sin(x.v)), T(cos(x.v)));
}
template <class T, std::size_t N>
Dual<T, N> cos(const Dual<T, N>& x) {
  using std::cos;
  using std::sin;
  return chain(x, T(cos(x.v)), T(-sin(x.v)));
}
template <class T, std::size_t N>
Dual<T, N> tan(const Dual<T, N>& x) {
  using std::tan;
  const T t = tan(x.v);
  return chain(x, t, T(T(1.0) + t * t));
}
template <class T, std::size_t N>
Dual<T, N> exp(const Dual<T, N>& x) {
  using std::exp;
  const T e = exp(x.v);
  return chain(x, e, e);
}
template <class T, std::size_t N>
Dual<T, N> log(const Dual<T, N>& x) {
  using std::log;
  return chain(x, T(log(x.v)), T(T(1.0) / x.v));
}
template <class T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& x) {
  using std::sqrt;
  const T r = sqrt(x.v);
  return chain(x, r, T(T(0.5) / r));
}
template <class T, std::size_t N>
Dual<T, N> abs(const Dual<T, N>& x) {
  const double s = value_of(x.v) > 0.0 ? 1.0 : (value_of(x.v) < 0.0 ? -1.0 : 0.0);
  return chain(x, T(T(s) * x.v), T(s));
}
template <class T, std::size_t N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x) {
  using std::atan2;
  const T r2 = x.v * x.v + y.v * y.v;
  Dual<T, N> r(atan2(y.v, x.v), {});
  for (std::size_t i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / r2;
  return r;
}

}  // namespace helixlab
