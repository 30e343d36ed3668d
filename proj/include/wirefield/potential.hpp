#pragma once

// Vector potential of the wire: A(t,q) = -(mu0 / 2 pi) [a0(r) + k a(t,r)] z with
//
//   a0(r)  = I0 ln r,
//   a(t,r) = -int_0^inf I(t - sqrt(r^2 + tau^2)/c) / sqrt(r^2 + tau^2) dtau.
//
// The sign of a follows the orientation of a0 (a0 is the regularized -int I0 / s), so that
// k a reduces to k I(t) ln r + const in the quasi-static limit and, for I = sin t, c = 1,
// a = (pi/2) [sin t Y0(r) + cos t J0(r)].
//
// The integral is split at tau = r. The outer part is evaluated either by rotating the
// integration ray into the lower half of the s = sqrt(r^2 + tau^2) plane, where each
// harmonic decays exponentially (contour), or by integrating by parts twice and truncating
// the tau^-3 remainder with an explicit bound (integration_by_parts). r-derivatives are
// carried through the integrand as truncated Taylor series.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "wirefield/current_model.hpp"
#include "wirefield/errors.hpp"
#include "wirefield/jet.hpp"
#include "wirefield/quadrature.hpp"

namespace wirefield {

enum class tail_method { contour, integration_by_parts };

struct quadrature_config {
  /// Absolute tolerance on a; derivative (i, j) uses abs_tol * max(1, w^i (w/c)^j), w the top frequency.
  double abs_tol = 1e-9;
  tail_method tail = tail_method::contour;
  long max_evaluations = 5'000'000;
};

struct estimate {
  double value = 0.0;
  double error = 0.0;
};

/// d[j] = d^i/dt^i d^j/dr^j a(t, r) for j = 0..max_dr, with error bounds.
struct radial_partials {
  int dt_order = 0;
  int max_dr = 0;
  std::array<double, 5> d{};
  std::array<double, 5> error{};
};

/// Complex radial kernel of one harmonic: W(r) = -int_0^inf exp(-i mu s / c) / s dtau, and its r-derivatives.
/// The harmonic Re[alpha exp(i mu t)] of I contributes Re[alpha (i mu)^i exp(i mu t) W^(j)(r)] to d^i_t d^j_r a.
struct harmonic_kernel {
  int max_dr = 0;
  std::array<std::complex<double>, 5> d{};
  std::array<double, 5> error{};
};

class potential_field {
 public:
  static constexpr int max_dt_order = 2;
  static constexpr int max_dr_order = 4;

  explicit potential_field(current_profile profile, double c = 1.0, quadrature_config quad = {})
      : profile_(std::move(profile)), c_(c), quad_(quad) {
    if (!(c_ > 0.0)) throw validation_error("signal speed c must be positive");
    if (!(quad_.abs_tol > 0.0)) throw validation_error("quadrature tolerance must be positive");
  }

  const current_profile& profile() const { return profile_; }
  double c() const { return c_; }
  const quadrature_config& quad() const { return quad_; }

  double order_tolerance(int dt_order, int dr_order) const {
    const double w = profile_.max_frequency();
    return quad_.abs_tol * std::max(1.0, std::pow(w, dt_order) * std::pow(w / c_, dr_order));
  }

 private:
  current_profile profile_;
  double c_;
  quadrature_config quad_;
};

namespace detail {

template <int N>
using cjet = jet<N, std::complex<double>>;

template <int N>
cjet<N> complexify(const jet<N>& x) {
  cjet<N> z;
  for (int k = 0; k <= N; ++k) z.c[k] = x.c[k];
  return z;
}

template <int N>
constexpr double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// Breaks on [0, Y]: geometric from `h0` up to `h`, then uniform with width h.
inline std::vector<double> graded_breaks(double h0, double h, double Y) {
  std::vector<double> x{0.0};
  double p = std::min(h0, h);
  while (p < h && p < Y) {
    x.push_back(p);
    p *= 2.0;
  }
  const double start = x.back();
  auto rest = quadrature::uniform_breaks(start, Y, h);
  x.insert(x.end(), rest.begin() + 1, rest.end());
  return x;
}

/// Kernel W_mu and its first N r-derivatives, contour method; tol_j bounds the error of derivative j.
template <int N>
harmonic_kernel contour_kernel(double mu, double c, double r, const std::array<double, N + 1>& tol,
                               long max_evaluations) {
  constexpr std::size_t M = 2 * (N + 1);
  using std::complex;
  const complex<double> I(0.0, 1.0);
  const double tau_s = r;  // split point
  const jet<N> R = jet<N>::variable(r);

  // Error budget: half to each part; Taylor coefficient j carries tol_j / j!, split over Re and Im.
  quadrature::vec<M> qtol{};
  for (int j = 0; j <= N; ++j) {
    const double t = 0.25 * tol[j] / factorial<N>(j) / std::sqrt(2.0);
    qtol[2 * j] = t;
    qtol[2 * j + 1] = t;
  }

  // Near part: int_0^{tau_s} exp(-i mu s/c) / s dtau.
  auto near = [&](double tau) {
    const jet<N> s = sqrt(R * R + tau * tau);
    const cjet<N> e = exp(complexify(s) * complex<double>(0.0, -mu / c));
    const cjet<N> f = e * complexify(1.0 / s);
    quadrature::vec<M> out{};
    for (int j = 0; j <= N; ++j) {
      out[2 * j] = f.c[j].real();
      out[2 * j + 1] = f.c[j].imag();
    }
    return out;
  };
  const auto near_breaks = quadrature::uniform_breaks(0.0, tau_s, std::numbers::pi * c / mu);
  const auto near_res = quadrature::integrate<M>(near, near_breaks, qtol, max_evaluations);

  // Outer part on the ray s = s_m - i y:  -i exp(-i mu s_m / c) int_0^inf exp(-mu y / c) / sqrt(q) dy,
  // q = s^2 - r^2 = tau_s^2 - y^2 - 2 i y s_m.
  const jet<N> s_m = sqrt(R * R + tau_s * tau_s);
  const cjet<N> s_mc = complexify(s_m);
  auto ray = [&](double y) {
    cjet<N> q = s_mc * complex<double>(0.0, -2.0 * y);
    q.c[0] += tau_s * tau_s - y * y;
    const cjet<N> g = complex<double>(std::exp(-mu * y / c)) / sqrt(q);
    quadrature::vec<M> out{};
    for (int j = 0; j <= N; ++j) {
      out[2 * j] = g.c[j].real();
      out[2 * j + 1] = g.c[j].imag();
    }
    return out;
  };
  // |d^j/dr^j q^{-1/2}| <= j! 4^j / tau_s^{j+1} along the ray (|q| >= tau_s^2 + y^2), so the
  // truncated piece beyond Y is bounded by that times exp(-mu Y / c) c / mu.
  double worst = 0.0;
  for (int j = 0; j <= N; ++j)
    worst = std::max(worst, factorial<N>(j) * std::pow(4.0, j) / std::pow(tau_s, j + 1) / (1e-3 * tol[j]));
  const double Y = (c / mu) * std::max(40.0, std::log(std::max(worst * c / mu, 1.0)) + 2.0);
  const auto ray_breaks = graded_breaks(0.25 * std::min(tau_s, c / mu), 2.0 * c / mu, Y);
  const auto ray_res = quadrature::integrate<M>(ray, ray_breaks, qtol, max_evaluations);

  cjet<N> ray_int;
  cjet<N> ray_err;  // componentwise magnitudes stored in the real part
  cjet<N> near_int;
  for (int j = 0; j <= N; ++j) {
    near_int.c[j] = {near_res.value[2 * j], near_res.value[2 * j + 1]};
    ray_int.c[j] = {ray_res.value[2 * j], ray_res.value[2 * j + 1]};
    ray_err.c[j] = std::hypot(ray_res.error[2 * j], ray_res.error[2 * j + 1]) +
                   std::exp(-mu * Y / c) * (c / mu) * std::pow(4.0, j) / std::pow(tau_s, j + 1);
  }
  const cjet<N> pref = exp(s_mc * complex<double>(0.0, -mu / c)) * (-I);
  const cjet<N> outer = pref * ray_int;

  harmonic_kernel K;
  K.max_dr = N;
  for (int j = 0; j <= N; ++j) {
    const double fj = factorial<N>(j);
    K.d[j] = -(near_int.c[j] + outer.c[j]) * fj;
    double e = std::hypot(near_res.error[2 * j], near_res.error[2 * j + 1]);
    for (int l = 0; l <= j; ++l) e += std::abs(pref.c[l]) * ray_err.c[j - l].real();
    K.error[j] = e * fj;
  }
  if (!near_res.converged || !ray_res.converged) {
    for (int j = 0; j <= N; ++j)
      if (K.error[j] > tol[j]) throw quadrature_budget(K.d[j].real(), K.error[j]);
  }
  return K;
}

/// d^i_t d^j_r a for j <= N by splitting at tau = r and integrating the outer part by parts twice.
template <int N>
radial_partials ibp_partials(const potential_field& field, double t, double r, int dt_order) {
  constexpr std::size_t M = N + 1;
  const auto& P = field.profile();
  const double c = field.c();
  const int i = dt_order;
  const jet<N> R = jet<N>::variable(r);
  const double w = P.max_frequency();

  std::array<double, N + 1> tol{};
  for (int j = 0; j <= N; ++j) tol[j] = field.order_tolerance(i, j);

  auto profile_jet = [&](int base, const jet<N>& u) {
    std::array<double, N + 1> d{};
    for (int l = 0; l <= N; ++l) d[l] = P.derivative(base + l, u.value());
    return compose(d, u);
  };

  // Cutoff: c^2 (1 + 3 sqrt 2) / (2 tau^2) * 2^j sum_l C(j,l) sup|D^(i-2+l)| / c^l bounds the
  // dropped remainder of derivative j once tau >= 4 max(r, c, 1).
  std::array<double, N + 1> tail_coef{};
  double tau_max = 4.0 * std::max({r, c, 1.0});
  for (int j = 0; j <= N; ++j) {
    double s = 0.0;
    for (int l = 0; l <= j; ++l) s += detail::binomial(j, l) * P.sup_bound(i - 2 + l) / std::pow(c, l);
    tail_coef[j] = c * c * (1.0 + 3.0 * std::numbers::sqrt2) / 2.0 * std::pow(2.0, j) * s;
    tau_max = std::max(tau_max, std::sqrt(tail_coef[j] / (0.25 * tol[j])));
  }

  quadrature::vec<M> qtol{};
  for (int j = 0; j <= N; ++j) qtol[j] = 0.25 * tol[j] / factorial<N>(j);

  const double tau_s = r;
  auto near = [&](double tau) {
    const jet<N> s = sqrt(R * R + tau * tau);
    const jet<N> f = profile_jet(i, t - s / c) / s;
    quadrature::vec<M> out{};
    for (int j = 0; j <= N; ++j) out[j] = f.c[j];
    return out;
  };
  const double panel = w > 0.0 ? std::numbers::pi * c / w : tau_max;
  const auto near_res = quadrature::integrate<M>(near, quadrature::uniform_breaks(0.0, tau_s, panel), qtol,
                                                 field.quad().max_evaluations);

  auto outer = [&](double tau) {
    const jet<N> s = sqrt(R * R + tau * tau);
    const jet<N> kappa = 1.0 / (s * (tau * tau)) - s * (3.0 / (tau * tau * tau * tau));
    const jet<N> f = profile_jet(i - 2, t - s / c) * kappa;
    quadrature::vec<M> out{};
    for (int j = 0; j <= N; ++j) out[j] = f.c[j];
    return out;
  };
  quadrature::vec<M> otol{};
  for (int j = 0; j <= N; ++j) otol[j] = qtol[j] / (c * c);
  const auto outer_res = quadrature::integrate<M>(outer, quadrature::uniform_breaks(tau_s, tau_max, panel), otol,
                                                  field.quad().max_evaluations);

  const jet<N> s_m = sqrt(R * R + tau_s * tau_s);
  const jet<N> boundary = profile_jet(i - 1, t - s_m / c) * (c / tau_s) -
                          profile_jet(i - 2, t - s_m / c) * s_m * (c * c / (tau_s * tau_s * tau_s));

  radial_partials out;
  out.dt_order = i;
  out.max_dr = N;
  bool ok = true;
  for (int j = 0; j <= N; ++j) {
    const double fj = factorial<N>(j);
    const double integral = near_res.value[j] + boundary.c[j] - c * c * outer_res.value[j];
    out.d[j] = -integral * fj;
    out.error[j] = (near_res.error[j] + c * c * outer_res.error[j]) * fj + tail_coef[j] / (tau_max * tau_max);
    if (out.error[j] > tol[j] && (!near_res.converged || !outer_res.converged)) ok = false;
  }
  if (!ok) throw quadrature_budget(out.d[0], out.error[0]);
  return out;
}

template <int N>
harmonic_kernel kernel_n(const potential_field& field, double mu, double r) {
  std::array<double, N + 1> tol{};
  for (int j = 0; j <= N; ++j) tol[j] = field.quad().abs_tol * std::max(1.0, std::pow(mu / field.c(), j));
  return contour_kernel<N>(mu, field.c(), r, tol, field.quad().max_evaluations);
}

template <int N>
radial_partials contour_partials(const potential_field& field, double t, double r, int dt_order) {
  const auto& P = field.profile();
  radial_partials out;
  out.dt_order = dt_order;
  out.max_dr = N;
  std::size_t active = 0;
  for (std::size_t m = 1; m <= P.harmonics(); ++m)
    if (std::abs(P.amplitude(m)) > 0.0) ++active;
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t m = 1; m <= P.harmonics(); ++m) {
    const std::complex<double> alpha = P.amplitude(m);
    if (std::abs(alpha) == 0.0) continue;
    const double mu = static_cast<double>(m) * P.angular_frequency();
    const std::complex<double> weight = alpha * std::pow(I * mu, dt_order) * std::exp(I * (mu * t));
    std::array<double, N + 1> tol{};
    for (int j = 0; j <= N; ++j)
      tol[j] = field.order_tolerance(dt_order, j) / (static_cast<double>(active) * std::abs(weight));
    const auto K = contour_kernel<N>(mu, field.c(), r, tol, field.quad().max_evaluations);
    for (int j = 0; j <= N; ++j) {
      out.d[j] += (weight * K.d[j]).real();
      out.error[j] += std::abs(weight) * K.error[j];
    }
  }
  return out;
}

template <int N>
radial_partials partials_n(const potential_field& field, double t, double r, int dt_order) {
  if (field.quad().tail == tail_method::integration_by_parts) return ibp_partials<N>(field, t, r, dt_order);
  return contour_partials<N>(field, t, r, dt_order);
}

inline void check_radius(double r) {
  if (!(r > 0.0)) throw wire_singularity(r);
}

inline void check_orders(int dt_order, int dr_order) {
  if (dt_order < 0 || dt_order > potential_field::max_dt_order || dr_order < 0 ||
      dr_order > potential_field::max_dr_order || dt_order + dr_order > current_profile::max_order)
    throw unsupported_order("potential derivative of order (t: " + std::to_string(dt_order) +
                            ", r: " + std::to_string(dr_order) + ") is not available");
}

}  // namespace detail

/// All r-derivatives up to max_dr of d^i_t a at (t, r) from one quadrature.
inline radial_partials partials(const potential_field& field, double t, double r, int dt_order, int max_dr) {
  detail::check_radius(r);
  detail::check_orders(dt_order, max_dr);
  if (field.profile().identically_zero()) {
    radial_partials z;
    z.dt_order = dt_order;
    z.max_dr = max_dr;
    return z;
  }
  if (field.profile().has_mean()) throw invalid_profile("the retarded potential of a current with nonzero mean diverges");
  switch (max_dr) {
    case 0: return detail::partials_n<0>(field, t, r, dt_order);
    case 1: return detail::partials_n<1>(field, t, r, dt_order);
    case 2: return detail::partials_n<2>(field, t, r, dt_order);
    case 3: return detail::partials_n<3>(field, t, r, dt_order);
    default: return detail::partials_n<4>(field, t, r, dt_order);
  }
}

/// Radial kernel of the harmonic with angular frequency mu (contour method), derivatives 0..max_dr.
inline harmonic_kernel kernel(const potential_field& field, double mu, double r, int max_dr) {
  detail::check_radius(r);
  detail::check_orders(0, max_dr);
  switch (max_dr) {
    case 0: return detail::kernel_n<0>(field, mu, r);
    case 1: return detail::kernel_n<1>(field, mu, r);
    case 2: return detail::kernel_n<2>(field, mu, r);
    case 3: return detail::kernel_n<3>(field, mu, r);
    default: return detail::kernel_n<4>(field, mu, r);
  }
}

inline double a0(const potential_field& field, double r) {
  detail::check_radius(r);
  return field.profile().I0() * std::log(r);
}

inline estimate a(const potential_field& field, double t, double r) {
  const auto p = partials(field, t, r, 0, 0);
  return {p.d[0], p.error[0]};
}

inline estimate a_partial(const potential_field& field, double t, double r, int dt_order, int dr_order) {
  detail::check_orders(dt_order, dr_order);
  const auto p = partials(field, t, r, dt_order, dr_order);
  return {p.d[static_cast<std::size_t>(dr_order)], p.error[static_cast<std::size_t>(dr_order)]};
}

/// d^2_t a - c^2 (d^2_r a + d_r a / r); vanishes off the wire.
inline estimate wave_residual(const potential_field& field, double t, double r) {
  const auto space = partials(field, t, r, 0, 2);
  const auto time = partials(field, t, r, 2, 0);
  const double c2 = field.c() * field.c();
  return {time.d[0] - c2 * (space.d[2] + space.d[1] / r),
          time.error[0] + c2 * (space.error[2] + space.error[1] / r)};
}

/// Wave operator applied to a0: d^2_r a0 + d_r a0 / r, identically zero for r > 0.
inline double static_laplacian(const potential_field& field, double r) {
  detail::check_radius(r);
  const double d1 = field.profile().I0() / r;
  const double d2 = -d1 / r;
  return d2 + d1 / r;
}

}  // namespace wirefield
