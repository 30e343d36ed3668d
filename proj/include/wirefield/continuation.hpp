#pragma once

// T-periodic radial orbits by Newton shooting on the period map, continued in k from the
// equilibrium r = rbar of the unperturbed problem.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wirefield/dynamics.hpp"
#include "wirefield/triplets.hpp"

namespace wirefield {

using mat2 = std::array<double, 4>;  // row-major

inline double det2(const mat2& m) { return m[0] * m[3] - m[1] * m[2]; }
inline double trace2(const mat2& m) { return m[0] + m[3]; }

/// Smallest singular value of a 2x2 matrix.
inline double sigma_min2(const mat2& m) {
  const double f = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
  const double d = std::abs(det2(m));
  const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * d * d));
  const double big = std::sqrt(0.5 * (f + disc));
  return big > 0.0 ? d / big : 0.0;
}

struct shooting_options {
  ode_options ode{1e-12, 1e-13};
  double residual_tol = 1e-9;
  int max_iterations = 30;
  int max_halvings = 8;
  double singular_tol = 1e-6;
  std::size_t samples = 256;  // orbit samples per period
};

/// The time-T map of the radial equation for a fixed model (k is supplied per call).
struct period_map_problem {
  radial_model model;
  double T = 1.0;
  shooting_options opt{};
};

struct map_image {
  radial_state x;
  mat2 monodromy{};
  /// Lifted angle swept by Phi(t) e1 over [0, T] in the coordinates (y, -y').
  double tracked_angle = 0.0;
};

inline map_image period_map(const period_map_problem& pm, radial_state x, double k, double t0 = 0.0) {
  detail::check_radius(x.r);
  const radial_model m = pm.model.with_k(k);
  const variational_vec x0{x.r, x.rdot, 1.0, 0.0, 0.0, 1.0};
  const auto samples = uniform_samples(t0, t0 + pm.T, 256);
  double angle = 0.0, last = 0.0;
  bool first = true;
  auto observe = [&](double, const variational_vec& s) {
    const double a = std::atan2(-s[4], s[2]);
    if (first) {
      angle = last = a;
      first = false;
      return;
    }
    double d = a - last;
    d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
    angle += d;
    last = a;
  };
  const auto xf = integrate_dense<6>(variational_system{&m}, x0, t0, t0 + pm.T, samples, observe,
                                     [](const variational_vec& s) { return s[0]; }, pm.opt.ode);
  map_image img;
  img.x = {xf[0], xf[1]};
  img.monodromy = {xf[2], xf[3], xf[4], xf[5]};
  img.tracked_angle = angle;
  return img;
}

/// Rotation angle of an elliptic monodromy: the candidate 2 pi m +- arccos(tr / 2) nearest
/// the tracked angle. Returns the tracked angle unchanged when |tr| > 2.
inline double lifted_rotation_angle(const mat2& M, double tracked) {
  const double tr = trace2(M);
  if (std::abs(tr) > 2.0) return tracked;
  const double base = std::acos(std::clamp(0.5 * tr, -1.0, 1.0));
  double best = tracked, dist = std::numeric_limits<double>::infinity();
  const double m0 = std::floor(tracked / (2.0 * std::numbers::pi));
  for (double m = m0 - 1.0; m <= m0 + 2.0; m += 1.0)
    for (double s : {-1.0, 1.0}) {
      const double cand = 2.0 * std::numbers::pi * m + s * base;
      if (std::abs(cand - tracked) < dist) {
        dist = std::abs(cand - tracked);
        best = cand;
      }
    }
  return best;
}

struct periodic_orbit {
  double k = 0.0;
  double T = 1.0;
  radial_state x0;
  double residual = 0.0;
  std::vector<double> t, r, rdot;  // one period, uniform grid
  mat2 monodromy{};
  double rotation_angle = 0.0;
  double sigma_min = 0.0;  // of monodromy - I
  int iterations = 0;

  double trace() const { return trace2(monodromy); }
  double determinant() const { return det2(monodromy); }
  bool elliptic() const { return std::abs(trace()) < 2.0; }
  double deviation_sup(double rbar) const {
    double d = 0.0;
    for (double v : r) d = std::max(d, std::abs(v - rbar));
    return d;
  }
};

namespace detail {

inline void sample_orbit(const period_map_problem& pm, periodic_orbit& o) {
  const radial_model m = pm.model.with_k(o.k);
  const auto s = uniform_samples(0.0, pm.T, pm.opt.samples);
  const auto tr = integrate_radial(m, o.x0, 0.0, pm.T, s, pm.opt.ode);
  o.t = tr.t;
  o.r.clear();
  o.rdot.clear();
  for (const auto& x : tr.x) {
    o.r.push_back(x[0]);
    o.rdot.push_back(x[1]);
  }
}

}  // namespace detail

/// Newton on P(x) - x with Jacobian M - I, damped by step halving.
inline periodic_orbit newton_shoot(const period_map_problem& pm, radial_state guess, double k) {
  const auto& opt = pm.opt;
  radial_state x = guess;
  map_image img = period_map(pm, x, k);
  auto residual_of = [](const map_image& im, radial_state at) {
    return std::hypot(im.x.r - at.r, im.x.rdot - at.rdot);
  };
  double res = residual_of(img, x);
  bool polished = false;
  for (int it = 0;; ++it) {
    const mat2 J{img.monodromy[0] - 1.0, img.monodromy[1], img.monodromy[2], img.monodromy[3] - 1.0};
    const double smin = sigma_min2(J);
    if (smin <= opt.singular_tol) throw singular_jacobian(smin);
    const bool converged = res <= opt.residual_tol;
    if (converged && polished) {
      periodic_orbit o;
      o.k = k;
      o.T = pm.T;
      o.x0 = x;
      o.residual = res;
      o.monodromy = img.monodromy;
      o.rotation_angle = lifted_rotation_angle(img.monodromy, img.tracked_angle);
      o.sigma_min = smin;
      o.iterations = it;
      detail::sample_orbit(pm, o);
      return o;
    }
    if (converged) {
      // One extra full step; kept only if it does not make things worse.
      polished = true;
      const double Fr = img.x.r - x.r, Fv = img.x.rdot - x.rdot;
      const double d = det2(J);
      const radial_state trial{x.r - (J[3] * Fr - J[1] * Fv) / d, x.rdot - (-J[2] * Fr + J[0] * Fv) / d};
      if (trial.r > 0.0) {
        try {
          const map_image ti = period_map(pm, trial, k);
          const double tres = residual_of(ti, trial);
          if (tres <= res) {
            x = trial;
            img = ti;
            res = tres;
          }
        } catch (const numerical_error&) {
        }
      }
      continue;
    }
    if (it >= opt.max_iterations) throw divergence("Newton shooting did not converge (residual " + std::to_string(res) + ")");
    const double Fr = img.x.r - x.r, Fv = img.x.rdot - x.rdot;
    const double d = det2(J);
    const double dr = -(J[3] * Fr - J[1] * Fv) / d;
    const double dv = -(-J[2] * Fr + J[0] * Fv) / d;
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      const radial_state trial{x.r + lambda * dr, x.rdot + lambda * dv};
      if (!(trial.r > 0.0)) continue;
      try {
        const map_image ti = period_map(pm, trial, k);
        const double tres = residual_of(ti, trial);
        if (tres < res || tres <= opt.residual_tol) {
          x = trial;
          img = ti;
          res = tres;
          accepted = true;
          break;
        }
      } catch (const collision&) {
      } catch (const step_underflow&) {
      }
    }
    if (!accepted) throw divergence("damped Newton step failed to reduce the residual " + std::to_string(res));
  }
}

enum class branch_end { completed, non_convergence, collision, eigenvalue_one };

inline const char* to_string(branch_end e) {
  switch (e) {
    case branch_end::completed: return "completed";
    case branch_end::non_convergence: return "non-convergence";
    case branch_end::collision: return "collision";
    case branch_end::eigenvalue_one: return "eigenvalue-one crossing";
  }
  return "?";
}

struct continuation_options {
  double dk_max = std::numeric_limits<double>::infinity();
  double dk_min = 1e-10;
};

struct branch {
  std::vector<periodic_orbit> orbits;  // k = 0 first, then every reached target
  branch_end reason = branch_end::completed;
  std::string message;
  double k0_estimate = 0.0;  // last k with a converged orbit
};

/// Continues the equilibrium (rbar, 0) through the targets (increasing |k|, one sign).
inline branch continue_in_k(const period_map_problem& pm, const triplet& trip, const std::vector<double>& k_targets,
                            const continuation_options& copt = {}) {
  branch b;
  try {
    b.orbits.push_back(newton_shoot(pm, {trip.rbar, 0.0}, 0.0));
  } catch (const numerical_error& e) {
    throw no_branch(std::string("no periodic orbit at k = 0: ") + e.what());
  }
  if (k_targets.empty()) return b;
  const double sgn = k_targets.front() < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < k_targets.size(); ++i) {
    const double prev_abs = i == 0 ? 0.0 : std::abs(k_targets[i - 1]);
    if (!(std::abs(k_targets[i]) > prev_abs) || (k_targets[i] < 0.0) != (sgn < 0.0))
      throw validation_error("k targets must increase strictly in |k| with a common sign");
  }
  const bool tr_above = b.orbits.front().trace() > 2.0;

  double k_cur = 0.0, k_prev = 0.0;
  radial_state x_cur = b.orbits.front().x0, x_prev = x_cur;
  bool have_prev = false;
  double dk = std::min(std::abs(k_targets.front()), copt.dk_max);
  int successes = 0;
  for (double target : k_targets) {
    while (std::abs(k_cur) < std::abs(target)) {
      const double k_try = sgn * std::min(std::abs(target), std::abs(k_cur) + dk);
      radial_state guess = x_cur;
      if (have_prev && k_cur != k_prev) {
        const double s = (k_try - k_cur) / (k_cur - k_prev);
        guess = {x_cur.r + s * (x_cur.r - x_prev.r), x_cur.rdot + s * (x_cur.rdot - x_prev.rdot)};
      }
      std::optional<periodic_orbit> o;
      branch_end failure = branch_end::non_convergence;
      std::string why;
      try {
        o = newton_shoot(pm, guess, k_try);
      } catch (const singular_jacobian& e) {
        failure = branch_end::eigenvalue_one;
        why = e.what();
      } catch (const collision& e) {
        failure = branch_end::collision;
        why = e.what();
      } catch (const numerical_error& e) {
        why = e.what();
      }
      if (o && ((o->trace() > 2.0) != tr_above)) {
        failure = branch_end::eigenvalue_one;
        why = "monodromy trace crossed 2";
        o.reset();
      }
      if (!o) {
        dk *= 0.5;
        successes = 0;
        if (dk < copt.dk_min) {
          if (b.orbits.size() == 1 && k_cur == 0.0) throw no_branch("continuation failed at the first step: " + why);
          b.reason = failure;
          b.message = why;
          b.k0_estimate = k_cur;
          return b;
        }
        continue;
      }
      x_prev = x_cur;
      k_prev = k_cur;
      x_cur = o->x0;
      k_cur = k_try;
      have_prev = true;
      if (k_try == target) b.orbits.push_back(std::move(*o));
      if (++successes >= 2) {
        dk = std::min(2.0 * dk, copt.dk_max);
        successes = 0;
      }
    }
  }
  b.k0_estimate = k_cur;
  return b;
}

}  // namespace wirefield
