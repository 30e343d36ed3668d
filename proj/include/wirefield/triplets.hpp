#pragma once

// Equilibrium triplets (rbar, L, p_z) of the unperturbed radial equation and their
// resonance classification.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "wirefield/errors.hpp"

namespace wirefield {

struct triplet {
  double rbar = 1.0;
  double L = 1.0;
  double p_z = 1.0;
  double I0 = 1.0;

  /// Linear frequency at rbar: omega0^2 = (2 L^2 / rbar^2 + I0^2) / rbar^2 = Abar.
  double omega0() const { return std::sqrt(2.0 * L * L / (rbar * rbar) + I0 * I0) / rbar; }
};

namespace detail {

inline void check_triplet(const triplet& t) {
  if (!(t.rbar > 0.0)) throw invalid_triplet("rbar must be positive");
  if (t.I0 == 0.0 || !std::isfinite(t.I0)) throw invalid_triplet("I0 must be nonzero");
  if (t.L == 0.0) throw invalid_triplet("L must be nonzero");
}

}  // namespace detail

/// L = branch |I0| rbar, p_z = I0 - I0 ln rbar.
inline triplet complete_triplet(double rbar, double I0, int branch = +1) {
  if (!(rbar > 0.0)) throw invalid_triplet("rbar must be positive");
  if (I0 == 0.0 || !std::isfinite(I0)) throw invalid_triplet("I0 must be nonzero");
  if (branch != 1 && branch != -1) throw invalid_triplet("branch must be +1 or -1");
  return {rbar, branch * std::abs(I0) * rbar, I0 - I0 * std::log(rbar), I0};
}

struct admissibility {
  bool admissible = false;
  double defect = 0.0;
};

/// defect = L^2 - rbar^2 I0 (p_z + I0 ln rbar).
inline admissibility is_admissible(const triplet& t, double tol = 1e-12) {
  detail::check_triplet(t);
  admissibility a;
  a.defect = t.L * t.L - t.rbar * t.rbar * t.I0 * (t.p_z + t.I0 * std::log(t.rbar));
  a.admissible = std::abs(a.defect) <= tol * std::max(1.0, t.L * t.L);
  return a;
}

struct resonance_report {
  double omega0 = 0.0;
  /// Literal reading of the resonance set: T is not n * omega0 for any n >= 1.
  bool paper_literal = true;
  /// No nontrivial T-periodic solution of y'' = -omega0^2 y: omega0 T is not 2 pi n.
  bool spectral = true;
  /// Relative distances to the nearest member of each resonance set, and that member's n.
  double literal_margin = 0.0;
  double spectral_margin = 0.0;
  long literal_n = 0;
  long spectral_n = 0;
};

namespace detail {

// Relative distance of x to {n * unit : 1 <= n <= max_n}, and the nearest n.
inline std::pair<double, long> lattice_distance(double x, double unit, long max_n = 1'000'000) {
  const double q = x / unit;
  long n = std::lround(q);
  n = std::clamp(n, 1L, max_n);
  return {std::abs(x - static_cast<double>(n) * unit) / std::abs(x), n};
}

}  // namespace detail

inline resonance_report resonance_check(const triplet& t, double T, double rel_tol = 1e-9) {
  if (!(T > 0.0)) throw validation_error("period T must be positive");
  if (!is_admissible(t).admissible) throw invalid_triplet("resonance is defined for admissible triplets only");
  resonance_report rep;
  rep.omega0 = t.omega0();
  auto [lm, ln] = detail::lattice_distance(T, rep.omega0);
  rep.literal_margin = lm;
  rep.literal_n = ln;
  rep.paper_literal = lm > rel_tol;
  auto [sm, sn] = detail::lattice_distance(rep.omega0 * T, 2.0 * std::numbers::pi);
  rep.spectral_margin = sm;
  rep.spectral_n = sn;
  rep.spectral = sm > rel_tol;
  return rep;
}

struct strong_report {
  bool strong = false;
  double margin = 0.0;  // pi / (2T) - omega0
};

inline strong_report strong_resonance_check(const triplet& t, double T) {
  if (!(T > 0.0)) throw validation_error("period T must be positive");
  if (!is_admissible(t).admissible) throw invalid_triplet("resonance is defined for admissible triplets only");
  strong_report s;
  s.margin = std::numbers::pi / (2.0 * T) - t.omega0();
  s.strong = s.margin > 0.0;
  return s;
}

}  // namespace wirefield
