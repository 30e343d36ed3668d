#pragma once

// Dormand-Prince 5(4) with dense output (Boost.Odeint), sampled at requested times,
// with a collision event on a user-supplied radius function.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include <boost/numeric/odeint.hpp>

#include "wirefield/errors.hpp"

namespace wirefield {

struct ode_options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double max_step = 0.0;  // 0: unlimited
  double r_min = 1e-8;    // collision radius
  long max_steps = 20'000'000;
};

namespace detail {

// Stands in for the derivative on or inside the collision radius: large enough that any
// step reaching there is rejected, small enough that the stage arithmetic stays finite.
inline constexpr double blocked_derivative = 1e100;

inline bool collided(double r, double r_min) { return !(r > r_min); }

}  // namespace detail

/// Integrates x' = sys(x, t) from t0 to t1 (either direction) and returns x(t1).
/// `observe(t, x)` is called at every entry of `samples` (monotone in the direction of
/// integration, inside [t0, t1]). `radius(x)` <= opt.r_min raises `collision` with the
/// first crossing time, located by bisection on the dense output.
template <std::size_t D, class System, class Radius, class Observer>
std::array<double, D> integrate_dense(System&& sys, const std::array<double, D>& x0, double t0, double t1,
                                      std::span<const double> samples, Observer&& observe, Radius&& radius,
                                      const ode_options& opt) {
  using state = std::array<double, D>;
  namespace odeint = boost::numeric::odeint;
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  // Integrate in s = dir * t so the stepper always runs forward.
  auto rhs = [&](const state& x, state& dx, double s) {
    const double r = radius(x);
    if (!(r > 0.5 * opt.r_min)) {
      dx.fill(detail::blocked_derivative);
      return;
    }
    sys(x, dx, dir * s);
    if (dir < 0.0)
      for (auto& v : dx) v = -v;
  };

  std::size_t next = 0;
  auto emit_until = [&](double s_end, auto&& state_at) {
    while (next < samples.size() && dir * samples[next] <= s_end) {
      observe(samples[next], state_at(dir * samples[next]));
      ++next;
    }
  };
  if (detail::collided(radius(x0), opt.r_min)) throw collision(t0);
  const double s0 = dir * t0, s1 = dir * t1;
  if (s1 == s0) {
    emit_until(s1, [&](double) { return x0; });
    return x0;
  }

  auto stepper = (opt.max_step > 0.0)
                     ? odeint::make_dense_output(opt.atol, opt.rtol, opt.max_step, odeint::runge_kutta_dopri5<state>())
                     : odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<state>());
  stepper.initialize(x0, s0, std::min(opt.initial_step, s1 - s0));
  state tmp;
  auto at = [&](double s) {
    stepper.calc_state(s, tmp);
    return tmp;
  };
  long steps = 0;
  while (stepper.current_time() < s1) {
    const double s_prev = stepper.current_time();
    try {
      stepper.do_step(rhs);
    } catch (const odeint::step_adjustment_error&) {
      throw step_underflow(dir * s_prev);
    }
    if (++steps > opt.max_steps) throw step_underflow(dir * stepper.current_time());
    const double s_cur = stepper.current_time();
    if (!(s_cur - s_prev > 1e-14 * std::max(1.0, std::abs(s_prev)))) throw step_underflow(dir * s_cur);

    // Collision: probe the step at a few interior points, then bisect.
    const double s_end = std::min(s_cur, s1);
    constexpr int probes = 4;
    double safe = s_prev;
    for (int i = 1; i <= probes; ++i) {
      const double s = s_prev + (s_end - s_prev) * i / probes;
      if (detail::collided(radius(at(s)), opt.r_min)) {
        double lo = safe, hi = s;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          (detail::collided(radius(at(mid)), opt.r_min) ? hi : lo) = mid;
        }
        emit_until(lo, at);
        throw collision(dir * hi);
      }
      safe = s;
    }
    emit_until(s_end, at);
  }
  state out = at(s1);
  return out;
}

/// Final state only.
template <std::size_t D, class System, class Radius>
std::array<double, D> integrate_to(System&& sys, const std::array<double, D>& x0, double t0, double t1,
                                   Radius&& radius, const ode_options& opt) {
  return integrate_dense<D>(sys, x0, t0, t1, std::span<const double>{}, [](double, const std::array<double, D>&) {},
                            radius, opt);
}

}  // namespace wirefield
