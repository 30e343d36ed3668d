#pragma once

// Globally adaptive Gauss-Kronrod (7, 15) quadrature for vector-valued integrands.
//
// The integrand returns std::array<double, M>; every component carries its own absolute
// tolerance. Error per interval is |K15 - G7| componentwise, which overestimates the
// error of the returned K15 value.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace wirefield::quadrature {

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

template <std::size_t M>
using vec = std::array<double, M>;

template <std::size_t M>
struct result {
  vec<M> value{};
  vec<M> error{};
  long evaluations = 0;
  bool converged = false;
};

template <std::size_t M>
struct interval {
  double a, b;
  vec<M> value, error;
  double badness;  // max_j error_j / tol_j
  bool operator<(const interval& o) const { return badness < o.badness; }
};

/// One 15-point Kronrod panel on [a, b].
template <std::size_t M, class F>
interval<M> gk15(F& f, double a, double b, const vec<M>& tol) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  vec<M> kron{}, gauss{};
  const vec<M> fc = f(center);
  for (std::size_t j = 0; j < M; ++j) {
    kron[j] = detail::wgk[7] * fc[j];
    gauss[j] = detail::wg[3] * fc[j];
  }
  for (int i = 0; i < 7; ++i) {
    const double dx = half * detail::xgk[static_cast<std::size_t>(i)];
    const vec<M> f1 = f(center - dx);
    const vec<M> f2 = f(center + dx);
    for (std::size_t j = 0; j < M; ++j) {
      const double s = f1[j] + f2[j];
      kron[j] += detail::wgk[static_cast<std::size_t>(i)] * s;
      if (i % 2 == 1) gauss[j] += detail::wg[static_cast<std::size_t>(i / 2)] * s;
    }
  }
  interval<M> iv{a, b, {}, {}, 0.0};
  for (std::size_t j = 0; j < M; ++j) {
    iv.value[j] = kron[j] * half;
    iv.error[j] = std::abs((kron[j] - gauss[j]) * half);
    iv.badness = std::max(iv.badness, iv.error[j] / tol[j]);
  }
  return iv;
}

/// Integrates f over the union of [breaks[i], breaks[i+1]] until the summed error of
/// every component is below its tolerance or `max_evaluations` is exceeded.
template <std::size_t M, class F>
result<M> integrate(F&& f, std::span<const double> breaks, const vec<M>& tol, long max_evaluations) {
  result<M> res;
  std::priority_queue<interval<M>> heap;
  vec<M> total_err{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] == breaks[i]) continue;
    auto iv = gk15<M>(f, breaks[i], breaks[i + 1], tol);
    res.evaluations += 15;
    for (std::size_t j = 0; j < M; ++j) total_err[j] += iv.error[j];
    heap.push(std::move(iv));
  }
  auto within = [&] {
    for (std::size_t j = 0; j < M; ++j)
      if (total_err[j] > tol[j]) return false;
    return true;
  };
  while (!heap.empty() && !within() && res.evaluations + 30 <= max_evaluations) {
    interval<M> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // cannot bisect further
      heap.push(std::move(worst));
      break;
    }
    auto left = gk15<M>(f, worst.a, mid, tol);
    auto right = gk15<M>(f, mid, worst.b, tol);
    res.evaluations += 30;
    for (std::size_t j = 0; j < M; ++j) total_err[j] += left.error[j] + right.error[j] - worst.error[j];
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // Resum from the panels: the running totals drift by rounding.
  res.value = {};
  res.error = {};
  while (!heap.empty()) {
    const auto& iv = heap.top();
    for (std::size_t j = 0; j < M; ++j) {
      res.value[j] += iv.value[j];
      res.error[j] += iv.error[j];
    }
    heap.pop();
  }
  res.converged = true;
  for (std::size_t j = 0; j < M; ++j)
    if (res.error[j] > tol[j]) res.converged = false;
  return res;
}

/// Uniform break points a = x0 < ... < xn = b with n = max(1, ceil((b - a) / max_width)).
inline std::vector<double> uniform_breaks(double a, double b, double max_width) {
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_width)));
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  x[n] = b;
  return x;
}

}  // namespace wirefield::quadrature
