#pragma once

// Truncated Taylor arithmetic. A jet<N, T> holds the coefficients
// c[k] = f^(k)(x0) / k!, k = 0..N, of a function of one variable around x0.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace wirefield {

template <int N, class T = double>
struct jet {
  static_assert(N >= 0);
  static constexpr int order = N;
  std::array<T, N + 1> c{};

  constexpr jet() = default;
  constexpr jet(T constant) { c[0] = constant; }  // NOLINT: implicit from scalar

  /// The independent variable x around x0.
  static constexpr jet variable(T x0) {
    jet v(x0);
    if constexpr (N >= 1) v.c[1] = T(1);
    return v;
  }

  constexpr T value() const { return c[0]; }

  /// k-th derivative at the expansion point.
  constexpr T derivative(int k) const {
    T f = c[static_cast<std::size_t>(k)];
    for (int i = 2; i <= k; ++i) f *= T(i);
    return f;
  }

  constexpr T& operator[](std::size_t k) { return c[k]; }
  constexpr const T& operator[](std::size_t k) const { return c[k]; }

  jet& operator+=(const jet& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  jet& operator-=(const jet& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  jet& operator*=(T s) {
    for (auto& x : c) x *= s;
    return *this;
  }
};

template <int N, class T>
jet<N, T> operator+(jet<N, T> a, const jet<N, T>& b) { return a += b; }
template <int N, class T>
jet<N, T> operator-(jet<N, T> a, const jet<N, T>& b) { return a -= b; }
template <int N, class T>
jet<N, T> operator-(jet<N, T> a) { return a *= T(-1); }
template <int N, class T>
jet<N, T> operator+(jet<N, T> a, T s) { a.c[0] += s; return a; }
template <int N, class T>
jet<N, T> operator+(T s, jet<N, T> a) { a.c[0] += s; return a; }
template <int N, class T>
jet<N, T> operator-(jet<N, T> a, T s) { a.c[0] -= s; return a; }
template <int N, class T>
jet<N, T> operator-(T s, jet<N, T> a) { a *= T(-1); a.c[0] += s; return a; }
template <int N, class T>
jet<N, T> operator*(jet<N, T> a, T s) { return a *= s; }
template <int N, class T>
jet<N, T> operator*(T s, jet<N, T> a) { return a *= s; }
template <int N, class T>
jet<N, T> operator/(jet<N, T> a, T s) { return a *= (T(1) / s); }

template <int N, class T>
jet<N, T> operator*(const jet<N, T>& a, const jet<N, T>& b) {
  jet<N, T> r;
  for (int k = 0; k <= N; ++k) {
    T s{};
    for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}

template <int N, class T>
jet<N, T> operator/(const jet<N, T>& a, const jet<N, T>& b) {
  jet<N, T> q;
  for (int k = 0; k <= N; ++k) {
    T s = a.c[k];
    for (int j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
    q.c[k] = s / b.c[0];
  }
  return q;
}

template <int N, class T>
jet<N, T> operator/(T s, const jet<N, T>& b) { return jet<N, T>(s) / b; }

template <int N, class T>
jet<N, T> sqrt(const jet<N, T>& a) {
  using std::sqrt;
  jet<N, T> s;
  s.c[0] = sqrt(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    T acc = a.c[k];
    for (int j = 1; j < k; ++j) acc -= s.c[j] * s.c[k - j];
    s.c[k] = acc / (T(2) * s.c[0]);
  }
  return s;
}

template <int N, class T>
jet<N, T> log(const jet<N, T>& a) {
  using std::log;
  jet<N, T> l;
  l.c[0] = log(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    T acc = a.c[k];
    for (int j = 1; j < k; ++j) acc -= (T(j) / T(k)) * l.c[j] * a.c[k - j];
    l.c[k] = acc / a.c[0];
  }
  return l;
}

/// f(u) for a jet u, given the derivatives f^(m)(u.value()), m = 0..N.
template <int N, class T, class U>
jet<N, T> compose(const std::array<U, N + 1>& f_derivs, const jet<N, T>& u) {
  jet<N, T> du = u;
  du.c[0] = T(0);
  jet<N, T> result{T(f_derivs[0])};
  jet<N, T> power(T(1));
  T factorial(1);
  for (int m = 1; m <= N; ++m) {
    power = power * du;
    factorial *= T(m);
    result += power * (T(f_derivs[static_cast<std::size_t>(m)]) / factorial);
  }
  return result;
}

/// Exponential of a jet, exp(u).
template <int N, class T>
jet<N, T> exp(const jet<N, T>& u) {
  using std::exp;
  jet<N, T> e;
  e.c[0] = exp(u.c[0]);
  for (int k = 1; k <= N; ++k) {
    T acc{};
    for (int j = 1; j <= k; ++j) acc += T(j) * u.c[j] * e.c[k - j];
    e.c[k] = acc / T(k);
  }
  return e;
}

}  // namespace wirefield
