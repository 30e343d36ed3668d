#pragma once

// Unit charge and mass in the wire field (mu0 = 2 pi). With L = r^2 theta' and p_z first integrals,
//
//   r'' = L^2 / r^3 - g (I0 / r + k d_r a),   g = p_z + I0 ln r + k a(t, r),
//   theta' = L / r^2,   z' = g,
//
// and r'' = -d_r V with V = L^2 / (2 r^2) + g^2 / 2.

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "wirefield/em_fields.hpp"
#include "wirefield/jet.hpp"
#include "wirefield/ode.hpp"
#include "wirefield/potential_source.hpp"

namespace wirefield {

struct momenta {
  double L = 0.0;
  double p_z = 0.0;
};

struct radial_state {
  double r = 1.0;
  double rdot = 0.0;
};

/// The reduced radial problem: a potential source plus (I0, k, L, p_z).
/// k is held here rather than read from the profile so one table serves a whole k-branch.
struct radial_model {
  std::shared_ptr<const potential_source> source;
  double I0 = 1.0;
  double k = 0.0;
  double L = 0.0;
  double p_z = 0.0;

  bool perturbed() const { return source && k != 0.0 && !source->profile().identically_zero(); }

  radial_model with_k(double new_k) const {
    radial_model m = *this;
    m.k = new_k;
    return m;
  }
  radial_model with_momenta(momenta mom) const {
    radial_model m = *this;
    m.L = mom.L;
    m.p_z = mom.p_z;
    return m;
  }
};

inline radial_model make_model(std::shared_ptr<const potential_source> source, momenta mom) {
  radial_model m;
  m.I0 = source->profile().I0();
  m.k = source->profile().k();
  m.L = mom.L;
  m.p_z = mom.p_z;
  m.source = std::move(source);
  return m;
}

inline radial_model make_model(const potential_field& field, momenta mom) {
  return make_model(std::make_shared<exact_potential>(field), mom);
}

/// a(t, r) as a Taylor jet in r (zero when unperturbed).
template <int N>
jet<N> potential_jet_a(const radial_model& m, double t, double r) {
  jet<N> A;
  if (!m.perturbed()) return A;
  const auto p = m.source->partials(t, r, 0, N);
  double f = 1.0;
  for (int j = 0; j <= N; ++j) {
    if (j > 1) f *= j;
    A.c[j] = p.d[static_cast<std::size_t>(j)] / f;
  }
  return A;
}

/// V(t, .) as a Taylor jet around r.
template <int N>
jet<N> effective_potential_jet(const radial_model& m, double t, double r) {
  detail::check_radius(r);
  const jet<N> R = jet<N>::variable(r);
  const jet<N> g = m.I0 * log(R) + m.p_z + m.k * potential_jet_a<N>(m, t, r);
  return (0.5 * m.L * m.L) / (R * R) + 0.5 * (g * g);
}

/// Radial force F(t, .) = -d_r V as a Taylor jet around r.
template <int N>
jet<N> radial_force_jet(const radial_model& m, double t, double r) {
  const jet<N + 1> V = effective_potential_jet<N + 1>(m, t, r);
  jet<N> F;
  for (int j = 0; j <= N; ++j) F.c[j] = -(j + 1) * V.c[j + 1];
  return F;
}

/// V and its r-derivatives 1..4.
inline std::array<double, 5> effective_potential(const radial_model& m, double t, double r) {
  const auto V = effective_potential_jet<4>(m, t, r);
  std::array<double, 5> d{};
  for (int j = 0; j <= 4; ++j) d[static_cast<std::size_t>(j)] = V.derivative(j);
  return d;
}

/// r'' exactly as the radial equation reads.
inline double radial_rhs(const radial_model& m, double t, double r) {
  detail::check_radius(r);
  double a = 0.0, a_r = 0.0;
  if (m.perturbed()) {
    const auto p = m.source->partials(t, r, 0, 1);
    a = p.d[0];
    a_r = p.d[1];
  }
  const double g = m.p_z + m.I0 * std::log(r) + m.k * a;
  return m.L * m.L / (r * r * r) - g * (m.I0 / r + m.k * a_r);
}

inline double radial_rhs(const radial_model& m, double t, radial_state s) { return radial_rhs(m, t, s.r); }

/// (F, d_r F) at (t, r).
inline std::array<double, 2> radial_rhs_and_slope(const radial_model& m, double t, double r) {
  double a = 0.0, a_r = 0.0, a_rr = 0.0;
  if (m.perturbed()) {
    const auto p = m.source->partials(t, r, 0, 2);
    a = p.d[0];
    a_r = p.d[1];
    a_rr = p.d[2];
  }
  const double g = m.p_z + m.I0 * std::log(r) + m.k * a;
  const double h = m.I0 / r + m.k * a_r;  // d_r g
  const double L2 = m.L * m.L;
  return {L2 / (r * r * r) - g * h, -3.0 * L2 / (r * r * r * r) - h * h - g * (-m.I0 / (r * r) + m.k * a_rr)};
}

/// z' = p_z + I0 ln r + k a(t, r).
inline double axial_velocity(const radial_model& m, double t, double r) {
  double a = 0.0;
  if (m.perturbed()) a = m.source->partials(t, r, 0, 0).d[0];
  return m.p_z + m.I0 * std::log(r) + m.k * a;
}

// ODE systems.

using radial_vec = std::array<double, 2>;       // r, r'
using variational_vec = std::array<double, 6>;  // r, r', Phi (row-major 2x2)
using cylindrical_vec = std::array<double, 4>;  // r, r', theta, z
using cartesian_vec = std::array<double, 6>;    // x, y, z, x', y', z'

struct radial_system {
  const radial_model* m;
  void operator()(const radial_vec& x, radial_vec& dx, double t) const {
    dx[0] = x[1];
    dx[1] = radial_rhs(*m, t, x[0]);
  }
};

/// Radial equation with its first variation, Phi' = [[0, 1], [dF/dr, 0]] Phi.
struct variational_system {
  const radial_model* m;
  void operator()(const variational_vec& x, variational_vec& dx, double t) const {
    const auto f = radial_rhs_and_slope(*m, t, x[0]);
    dx[0] = x[1];
    dx[1] = f[0];
    dx[2] = x[4];
    dx[3] = x[5];
    dx[4] = f[1] * x[2];
    dx[5] = f[1] * x[3];
  }
};

struct cylindrical_system {
  const radial_model* m;
  void operator()(const cylindrical_vec& x, cylindrical_vec& dx, double t) const {
    dx[0] = x[1];
    dx[1] = radial_rhs(*m, t, x[0]);
    dx[2] = m->L / (x[0] * x[0]);
    dx[3] = axial_velocity(*m, t, x[0]);
  }
};

/// Newton-Lorentz, q'' = E + q' x B.
struct cartesian_system {
  const radial_model* m;
  void operator()(const cartesian_vec& x, cartesian_vec& dx, double t) const {
    const double r = std::hypot(x[0], x[1]);
    double E_z = 0.0, B = m->I0 / r;
    if (m->perturbed()) {
      E_z = m->k * m->source->partials(t, r, 1, 0).d[0];
      B += m->k * m->source->partials(t, r, 0, 1).d[1];
    }
    const double Bx = -B * x[1] / r, By = B * x[0] / r;
    dx[0] = x[3];
    dx[1] = x[4];
    dx[2] = x[5];
    dx[3] = -x[5] * By;
    dx[4] = x[5] * Bx;
    dx[5] = E_z + x[3] * By - x[4] * Bx;
  }
};

template <std::size_t D>
struct trajectory {
  std::vector<double> t;
  std::vector<std::array<double, D>> x;
};

enum class system_kind { radial, cylindrical, cartesian };

inline std::vector<double> uniform_samples(double t0, double t1, std::size_t intervals) {
  std::vector<double> s(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    s[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(intervals);
  s[intervals] = t1;
  return s;
}

namespace detail {

template <std::size_t D, class Sys, class Radius>
trajectory<D> run(Sys sys, const std::array<double, D>& x0, double t0, double t1, std::span<const double> samples,
                  Radius radius, const ode_options& opt) {
  trajectory<D> out;
  out.t.reserve(samples.size());
  out.x.reserve(samples.size());
  integrate_dense<D>(
      sys, x0, t0, t1, samples,
      [&](double t, const std::array<double, D>& x) {
        out.t.push_back(t);
        out.x.push_back(x);
      },
      radius, opt);
  return out;
}

}  // namespace detail

inline trajectory<2> integrate_radial(const radial_model& m, radial_state x0, double t0, double t1,
                                      std::span<const double> samples, const ode_options& opt = {}) {
  detail::check_radius(x0.r);
  return detail::run<2>(radial_system{&m}, {x0.r, x0.rdot}, t0, t1, samples, [](const radial_vec& x) { return x[0]; },
                        opt);
}

inline trajectory<4> integrate_cylindrical(const radial_model& m, const cylindrical_vec& x0, double t0, double t1,
                                           std::span<const double> samples, const ode_options& opt = {}) {
  detail::check_radius(x0[0]);
  return detail::run<4>(cylindrical_system{&m}, x0, t0, t1, samples,
                        [](const cylindrical_vec& x) { return x[0]; }, opt);
}

inline trajectory<6> integrate_cartesian(const radial_model& m, const cartesian_vec& x0, double t0, double t1,
                                         std::span<const double> samples, const ode_options& opt = {}) {
  detail::check_radius(std::hypot(x0[0], x0[1]));
  return detail::run<6>(cartesian_system{&m}, x0, t0, t1, samples,
                        [](const cartesian_vec& x) { return std::hypot(x[0], x[1]); }, opt);
}

/// Cartesian state at (r, 0, 0) with the given radial state and the model's (L, p_z).
inline cartesian_vec cartesian_initial(const radial_model& m, double t0, radial_state s, double z0 = 0.0) {
  detail::check_radius(s.r);
  return {s.r, 0.0, z0, s.rdot, m.L / s.r, axial_velocity(m, t0, s.r)};
}

struct integrals_sample {
  double t = 0.0;
  double L = 0.0;
  double p_z = 0.0;
  double E0 = 0.0;
};

/// L = x y' - y x',  p_z = z' - (I0 ln r + k a),  E0 = r'^2 / 2 + V0(r) with V0 the k = 0 potential.
inline std::vector<integrals_sample> first_integrals(const trajectory<6>& tr, const radial_model& m) {
  std::vector<integrals_sample> out;
  out.reserve(tr.t.size());
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const auto& x = tr.x[i];
    const double r = std::hypot(x[0], x[1]);
    detail::check_radius(r);
    integrals_sample s;
    s.t = tr.t[i];
    s.L = x[0] * x[4] - x[1] * x[3];
    double a = 0.0;
    if (m.perturbed()) a = m.source->partials(s.t, r, 0, 0).d[0];
    s.p_z = x[5] - (m.I0 * std::log(r) + m.k * a);
    const double rdot = (x[0] * x[3] + x[1] * x[4]) / r;
    const double g0 = s.p_z + m.I0 * std::log(r);
    s.E0 = 0.5 * rdot * rdot + 0.5 * s.L * s.L / (r * r) + 0.5 * g0 * g0;
    out.push_back(s);
  }
  return out;
}

}  // namespace wirefield
