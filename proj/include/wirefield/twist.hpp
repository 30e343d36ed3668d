#pragma once

// Third-order expansion y'' + A y + B y^2 + C y^3 = 0 of the radial equation around a
// T-periodic orbit r_k, and the sufficient twist conditions
//   (i)   0 < A_* <= A^* < (pi / 2T)^2,
//   (ii)  C_* > 0,
//   (iii) 10 B_*^2 A_*^{3/2} > 9 C^* (A^*)^{5/2}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "wirefield/continuation.hpp"

namespace wirefield {

struct limit_coefficients {
  double A = 0.0, B = 0.0, C = 0.0;
};

/// Values at the equilibrium of an admissible triplet.
inline limit_coefficients limit_values(const triplet& t) {
  const double r = t.rbar, L2 = t.L * t.L, I2 = t.I0 * t.I0;
  return {2.0 * L2 / std::pow(r, 4) + I2 / (r * r), -5.0 * L2 / std::pow(r, 5) - 1.5 * I2 / std::pow(r, 3),
          9.0 * L2 / std::pow(r, 6) + (11.0 / 6.0) * I2 / std::pow(r, 4)};
}

enum class twist_formula {
  /// Taylor coefficients of the radial force: A = -F', B = -F''/2, C = -F'''/6.
  taylor,
  /// Static part plus k d^{n}_r (a g), n = 2, 3, 4, with g = p_z + I0 ln r + k a and no 1/n! weights.
  unweighted,
};

struct twist_sample {
  double A = 0.0, B = 0.0, C = 0.0;
};

/// Coefficients at a single (t, r).
inline twist_sample coefficients_at(const radial_model& m, double t, double r, twist_formula f = twist_formula::taylor) {
  if (f == twist_formula::taylor) {
    const jet<3> F = radial_force_jet<3>(m, t, r);
    return {-F.c[1], -F.c[2], -F.c[3]};
  }
  const double L2 = m.L * m.L, I0 = m.I0, pz = m.p_z, lr = std::log(r);
  twist_sample s;
  s.A = 3.0 * L2 / std::pow(r, 4) - I0 * pz / (r * r) + I0 * I0 * (1.0 - lr) / (r * r);
  s.B = -6.0 * L2 / std::pow(r, 5) + I0 * pz / std::pow(r, 3) + I0 * I0 * (2.0 * lr - 3.0) / (2.0 * std::pow(r, 3));
  s.C = 10.0 * L2 / std::pow(r, 6) - I0 * pz / std::pow(r, 4) + I0 * I0 * (11.0 - 6.0 * lr) / (6.0 * std::pow(r, 4));
  if (m.perturbed()) {
    const jet<4> R = jet<4>::variable(r);
    const jet<4> a = potential_jet_a<4>(m, t, r);
    const jet<4> ag = a * (I0 * log(R) + pz + m.k * a);
    s.A += m.k * ag.derivative(2);
    s.B += m.k * ag.derivative(3);
    s.C += m.k * ag.derivative(4);
  }
  return s;
}

struct twist_coefficients {
  std::vector<double> t, A, B, C;
  double Abar = 0.0, Bbar = 0.0, Cbar = 0.0;
  std::vector<double> xi_A, xi_B, xi_C;  // A - Abar etc.

  static double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  }
};

inline twist_coefficients compute_coefficients(const periodic_orbit& orbit, const radial_model& model,
                                               const triplet& trip, twist_formula f = twist_formula::taylor) {
  const radial_model m = model.with_k(orbit.k);
  twist_coefficients c;
  const auto lim = limit_values(trip);
  c.Abar = lim.A;
  c.Bbar = lim.B;
  c.Cbar = lim.C;
  for (std::size_t i = 0; i < orbit.t.size(); ++i) {
    const auto s = coefficients_at(m, orbit.t[i], orbit.r[i], f);
    c.t.push_back(orbit.t[i]);
    c.A.push_back(s.A);
    c.B.push_back(s.B);
    c.C.push_back(s.C);
    c.xi_A.push_back(s.A - lim.A);
    c.xi_B.push_back(s.B - lim.B);
    c.xi_C.push_back(s.C - lim.C);
  }
  return c;
}

/// Grid extremes widened by half the largest jump between neighbours, so that a sampled
/// continuous function cannot hide a more extreme value between nodes.
struct envelope {
  double inf = 0.0, sup = 0.0;
};

inline envelope sampled_envelope(const std::vector<double>& v) {
  if (v.empty()) return {};
  double lo = v.front(), hi = v.front(), jump = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
    if (i > 0) jump = std::max(jump, std::abs(v[i] - v[i - 1]));
  }
  return {lo - 0.5 * jump, hi + 0.5 * jump};
}

struct twist_certificate {
  double A_inf = 0.0, A_sup = 0.0, C_inf = 0.0, C_sup = 0.0;
  /// Squared infimum of |B|, or 0 when B may change sign.
  double B_inf_sq = 0.0;
  bool condition_i = false, condition_ii = false, condition_iii = false;
  double margin_i = 0.0;    // (pi / 2T)^2 - A^*
  double margin_ii = 0.0;   // C_*
  double margin_iii = 0.0;  // 10 B_*^2 - 9 C^* (A^*)^{5/2} / A_*^{3/2}
  /// Rotation angle of the orbit's monodromy over 2 pi (revolutions per period).
  double rotation_bound = 0.0;

  bool certified() const { return condition_i && condition_ii && condition_iii; }
};

inline twist_certificate check_twist(const twist_coefficients& c, double T, double rotation_angle = 0.0) {
  twist_certificate z;
  const auto A = sampled_envelope(c.A), B = sampled_envelope(c.B), C = sampled_envelope(c.C);
  z.A_inf = A.inf;
  z.A_sup = A.sup;
  z.C_inf = C.inf;
  z.C_sup = C.sup;
  z.B_inf_sq = (B.inf > 0.0 || B.sup < 0.0) ? std::pow(std::min(std::abs(B.inf), std::abs(B.sup)), 2) : 0.0;
  const double bound = std::pow(std::numbers::pi / (2.0 * T), 2);
  z.margin_i = bound - z.A_sup;
  z.condition_i = z.A_inf > 0.0 && z.margin_i > 0.0;
  z.margin_ii = z.C_inf;
  z.condition_ii = z.margin_ii > 0.0;
  if (z.A_inf > 0.0) {
    z.margin_iii = 10.0 * z.B_inf_sq - 9.0 * z.C_sup * std::pow(z.A_sup, 2.5) / std::pow(z.A_inf, 1.5);
    z.condition_iii = z.margin_iii > 0.0;
  }
  z.rotation_bound = rotation_angle / (2.0 * std::numbers::pi);
  return z;
}

inline twist_certificate check_twist(const twist_coefficients& c, const periodic_orbit& o) {
  return check_twist(c, o.T, o.rotation_angle);
}

/// Largest k on the branch whose certificate passes with every margin above `safety`.
inline std::optional<double> twist_threshold(const branch& b, const radial_model& model, const triplet& trip,
                                             double safety = 0.0) {
  std::optional<double> k1;
  for (const auto& o : b.orbits) {
    const auto z = check_twist(compute_coefficients(o, model, trip), o);
    if (z.certified() && z.margin_i > safety && z.margin_ii > safety && z.margin_iii > safety && z.A_inf > safety)
      if (!k1 || std::abs(o.k) > std::abs(*k1)) k1 = o.k;
  }
  return k1;
}

}  // namespace wirefield
