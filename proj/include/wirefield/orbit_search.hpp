#pragma once

// Dynamics of the period map near an elliptic T-periodic orbit: rotation numbers,
// (p, q)-subharmonics and perturbation ensembles.
//
// Deviations y = r - r_k are integrated together with the centre orbit ("pair system"),
// so small deviations keep their relative accuracy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "wirefield/continuation.hpp"
#include "wirefield/parallel.hpp"

namespace wirefield {

/// Centre (r, r') under `centre`, deviation (y, y') of a second trajectory under `other`.
struct pair_system {
  const radial_model* centre;
  const radial_model* other;
  void operator()(const std::array<double, 4>& x, std::array<double, 4>& dx, double t) const {
    const double Fc = radial_rhs(*centre, t, x[0]);
    dx[0] = x[1];
    dx[1] = Fc;
    dx[2] = x[3];
    dx[3] = radial_rhs(*other, t, x[0] + x[2]) - Fc;
  }
};

inline double pair_radius(const std::array<double, 4>& x) { return std::min(x[0], x[0] + x[2]); }

/// Coordinates in which the linearized period map is the rotation by the orbit's angle.
/// With z = (y, -y') and M_z the monodromy in z, J = (M_z - cos(theta) I) / sin(theta)
/// satisfies J^2 = -I; the frame is (e1, J e1).
struct normal_frame {
  double theta = 0.0;
  std::array<double, 2> b2{};  // J e1 in z coordinates

  std::array<double, 2> to_frame(double y, double ydot) const {
    const double z1 = y, z2 = -ydot;
    const double v = z2 / b2[1];
    return {z1 - v * b2[0], v};
  }
  std::array<double, 2> from_frame(double u, double v) const {
    const double z1 = u + v * b2[0], z2 = v * b2[1];
    return {z1, -z2};
  }
};

inline normal_frame make_frame(const periodic_orbit& o) {
  if (!o.elliptic()) throw validation_error("the orbit is not elliptic (|trace| >= 2)");
  const auto& M = o.monodromy;
  // M_z = S M S with S = diag(1, -1).
  const double mz00 = M[0], mz10 = -M[2];
  normal_frame f;
  f.theta = o.rotation_angle;
  const double s = std::sin(f.theta), c = std::cos(f.theta);
  f.b2 = {(mz00 - c) / s, mz10 / s};
  return f;
}

struct deviation_options {
  ode_options ode{1e-12, 1e-16};
};

/// Deviation after `periods` periods, the centre restarting from x0 every period.
inline std::array<double, 2> advance_deviation(const periodic_orbit& o, const radial_model& centre,
                                               const radial_model& other, std::array<double, 2> dev, int periods,
                                               const deviation_options& opt) {
  for (int n = 0; n < periods; ++n) {
    const std::array<double, 4> x0{o.x0.r, o.x0.rdot, dev[0], dev[1]};
    const auto x = integrate_to<4>(pair_system{&centre, &other}, x0, 0.0, o.T, pair_radius, opt.ode);
    dev = {x[2], x[3]};
  }
  return dev;
}

/// Angle increment of one iterate, lifted to lie within pi of the linear angle.
inline double lift_increment(double d, double theta) {
  return theta + std::remainder(d - theta, 2.0 * std::numbers::pi);
}

struct rotation_options {
  std::size_t iterations = 10'000;
  double annulus = 10.0;  // iterates must stay within [radius / annulus, radius * annulus]
  deviation_options dev{};
};

/// Revolutions per period of the iterates started at `radius` along e1.
inline double rotation_number(const periodic_orbit& o, const radial_model& model, double radius,
                              const rotation_options& opt = {}) {
  const auto frame = make_frame(o);
  const radial_model m = model.with_k(o.k);
  auto dev = frame.from_frame(radius, 0.0);
  double prev = 0.0, total = 0.0;
  for (std::size_t n = 0; n < opt.iterations; ++n) {
    dev = advance_deviation(o, m, m, dev, 1, opt.dev);
    const auto w = frame.to_frame(dev[0], dev[1]);
    const double rho = std::hypot(w[0], w[1]);
    if (!(rho < radius * opt.annulus && rho > radius / opt.annulus))
      throw escaped("iterate left the sampling annulus after " + std::to_string(n + 1) + " periods");
    const double ang = std::atan2(w[1], w[0]);
    total += lift_increment(ang - prev, frame.theta);
    prev = ang;
  }
  return total / (2.0 * std::numbers::pi * static_cast<double>(opt.iterations));
}

/// Rotation number for an arbitrary starting state, measured around the orbit's fixed point.
inline double rotation_number(const periodic_orbit& o, const radial_model& model, radial_state start,
                              const rotation_options& opt = {}) {
  const auto frame = make_frame(o);
  const auto w = frame.to_frame(start.r - o.x0.r, start.rdot - o.x0.rdot);
  const double radius = std::hypot(w[0], w[1]);
  const radial_model m = model.with_k(o.k);
  std::array<double, 2> dev{start.r - o.x0.r, start.rdot - o.x0.rdot};
  double prev = std::atan2(w[1], w[0]), total = 0.0;
  for (std::size_t n = 0; n < opt.iterations; ++n) {
    dev = advance_deviation(o, m, m, dev, 1, opt.dev);
    const auto z = frame.to_frame(dev[0], dev[1]);
    const double rho = std::hypot(z[0], z[1]);
    if (!(rho < radius * opt.annulus && rho > radius / opt.annulus))
      throw escaped("iterate left the sampling annulus after " + std::to_string(n + 1) + " periods");
    const double ang = std::atan2(z[1], z[0]);
    total += lift_increment(ang - prev, frame.theta);
    prev = ang;
  }
  return total / (2.0 * std::numbers::pi * static_cast<double>(opt.iterations));
}

// Subharmonics.

struct subharmonic_options {
  double amplitude_min = 1e-3;
  double amplitude_max = 0.8;  // in units of rbar
  std::size_t amplitude_steps = 40;
  std::size_t phase_steps = 16;  // over one sector of width 2 pi / q
  double residual_tol = 1e-8;
  double minimal_period_sep = 1e-6;
  double zero_cluster_tol = 1e-10;
  std::size_t samples_per_period = 256;
  int newton_iterations = 20;
  deviation_options dev{};
  ode_options ode{1e-12, 1e-13};
};

struct subharmonic_orbit {
  int p = 0, q = 0;
  bool found = false;
  std::string message;
  radial_state x0;
  double amplitude = 0.0, phase = 0.0;  // seed in the normal frame
  double residual = 0.0;
  int zero_count = 0;
  std::vector<bool> minimal_period_check;  // entry l-1: not lT-periodic
  std::vector<double> t, r;               // samples over [0, qT]
};

/// Sign changes of v over one closed cycle, ignoring entries within `tol` of zero.
inline int count_sign_changes(const std::vector<double>& v, double tol) {
  std::vector<int> s;
  for (double x : v)
    if (std::abs(x) > tol) s.push_back(x > 0.0 ? 1 : -1);
  if (s.size() < 2) return 0;
  int n = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] != s[(i + 1) % s.size()]) ++n;
  return n;
}

namespace detail {

struct sub_context {
  const periodic_orbit* o;
  radial_model m;
  normal_frame frame;
  int q;
  const subharmonic_options* opt;

  // Lifted angle after q iterates and final frame radius, from frame point (rho, phi).
  std::pair<double, double> sweep(double rho, double phi) const {
    auto dev = frame.from_frame(rho * std::cos(phi), rho * std::sin(phi));
    double prev = phi, total = 0.0, last_rho = rho;
    for (int n = 0; n < q; ++n) {
      dev = advance_deviation(*o, m, m, dev, 1, opt->dev);
      const auto w = frame.to_frame(dev[0], dev[1]);
      const double ang = std::atan2(w[1], w[0]);
      total += lift_increment(ang - prev, frame.theta);
      prev = ang;
      last_rho = std::hypot(w[0], w[1]);
    }
    return {total, last_rho};
  }
};

}  // namespace detail

/// Searches a (p, q)-subharmonic around the elliptic orbit o: radius where the angle after q
/// iterates is 2 pi p, then the phase where the radial mismatch vanishes, then Newton on P^q.
inline subharmonic_orbit find_subharmonic(const period_map_problem& pm, const periodic_orbit& o, double rbar, int p,
                                          int q, const subharmonic_options& opt = {}) {
  if (p < 1 || q < 1) throw validation_error("p and q must be positive");
  subharmonic_orbit res;
  res.p = p;
  res.q = q;
  detail::sub_context ctx{&o, pm.model.with_k(o.k), make_frame(o), q, &opt};
  const double goal = 2.0 * std::numbers::pi * p;
  using boost::math::tools::eps_tolerance;
  using boost::math::tools::toms748_solve;

  // Radius on the ray phi where the q-iterate angle equals 2 pi p; the scan starts at `hint` if given.
  auto radius_at = [&](double phi, double hint) -> std::optional<double> {
    auto f = [&](double rho) { return ctx.sweep(rho, phi).first - goal; };
    const double lo_amp = opt.amplitude_min * rbar, hi_amp = opt.amplitude_max * rbar;
    std::vector<double> grid;
    if (hint > 0.0) {
      for (double d = 0.02; d <= 0.5; d *= 2.0) {
        grid.push_back(std::max(lo_amp, hint * (1.0 - d)));
        grid.push_back(std::min(hi_amp, hint * (1.0 + d)));
      }
    } else {
      for (std::size_t i = 0; i <= opt.amplitude_steps; ++i)
        grid.push_back(lo_amp * std::pow(hi_amp / lo_amp, static_cast<double>(i) / static_cast<double>(opt.amplitude_steps)));
    }
    auto try_bracket = [&](double a, double b) -> std::optional<double> {
      try {
        const double fa = f(a), fb = f(b);
        if (fa == 0.0) return a;
        if ((fa > 0.0) == (fb > 0.0)) return std::nullopt;
        std::uintmax_t it = 100;
        auto br = toms748_solve(f, a, b, fa, fb, eps_tolerance<double>(45), it);
        return 0.5 * (br.first + br.second);
      } catch (const numerical_error&) {
        return std::nullopt;
      }
    };
    if (hint > 0.0) {
      for (std::size_t i = 0; i + 1 < grid.size(); i += 2)
        if (auto r = try_bracket(grid[i], grid[i + 1])) return r;
      return std::nullopt;
    }
    double prev_x = grid[0], prev_f;
    try {
      prev_f = f(prev_x);
    } catch (const numerical_error&) {
      return std::nullopt;
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double fi;
      try {
        fi = f(grid[i]);
      } catch (const numerical_error&) {
        return std::nullopt;  // collision or escape beyond this amplitude
      }
      if ((prev_f > 0.0) != (fi > 0.0)) {
        std::uintmax_t it = 100;
        auto br = toms748_solve(f, prev_x, grid[i], prev_f, fi, eps_tolerance<double>(45), it);
        return 0.5 * (br.first + br.second);
      }
      prev_x = grid[i];
      prev_f = fi;
    }
    return std::nullopt;
  };

  const auto rho0 = radius_at(0.0, -1.0);
  if (!rho0) {
    res.message = "no amplitude with rotation p/q on the scanned range";
    return res;
  }

  // Radial mismatch along the phase, over one sector.
  double last_rho = *rho0;
  auto mismatch = [&](double phi) -> double {
    const auto rho = radius_at(phi, last_rho);
    if (!rho) throw no_branch("lost the p/q radius while scanning the phase");
    last_rho = *rho;
    return ctx.sweep(*rho, phi).second - *rho;
  };
  double seed_phi = 0.0, seed_rho = *rho0;
  try {
    const double sector = 2.0 * std::numbers::pi / q;
    double a = 0.0, fa = mismatch(0.0);
    bool bracketed = std::abs(fa) < 1e-14;
    for (std::size_t i = 1; i <= opt.phase_steps && !bracketed; ++i) {
      const double b = sector * static_cast<double>(i) / static_cast<double>(opt.phase_steps);
      const double fb = mismatch(b);
      if ((fa > 0.0) != (fb > 0.0)) {
        std::uintmax_t it = 60;
        auto br = toms748_solve(mismatch, a, b, fa, fb, eps_tolerance<double>(40), it);
        seed_phi = 0.5 * (br.first + br.second);
        bracketed = true;
        break;
      }
      a = b;
      fa = fb;
    }
    if (!bracketed) seed_phi = 0.0;  // mismatch never changes sign: degenerate (integrable) case
    const auto rho = radius_at(seed_phi, last_rho);
    if (rho) seed_rho = *rho;
  } catch (const numerical_error& e) {
    res.message = e.what();
    return res;
  }
  res.amplitude = seed_rho;
  res.phase = seed_phi;
  const auto d0 = ctx.frame.from_frame(seed_rho * std::cos(seed_phi), seed_rho * std::sin(seed_phi));
  radial_state x{o.x0.r + d0[0], o.x0.rdot + d0[1]};

  // Newton on P^q(x) - x.
  period_map_problem pq = pm;
  pq.T = q * pm.T;
  pq.opt.ode = opt.ode;
  try {
    map_image img = period_map(pq, x, o.k);
    double r = std::hypot(img.x.r - x.r, img.x.rdot - x.rdot);
    for (int it = 0; it < opt.newton_iterations && r > 0.01 * opt.residual_tol; ++it) {
      const mat2 J{img.monodromy[0] - 1.0, img.monodromy[1], img.monodromy[2], img.monodromy[3] - 1.0};
      const double d = det2(J);
      if (d == 0.0) break;
      const double Fr = img.x.r - x.r, Fv = img.x.rdot - x.rdot;
      const double dr = -(J[3] * Fr - J[1] * Fv) / d, dv = -(-J[2] * Fr + J[0] * Fv) / d;
      bool moved = false;
      for (double lambda = 1.0; lambda > 1e-3; lambda *= 0.5) {
        const radial_state trial{x.r + lambda * dr, x.rdot + lambda * dv};
        try {
          const auto ti = period_map(pq, trial, o.k);
          const double tr = std::hypot(ti.x.r - trial.r, ti.x.rdot - trial.rdot);
          if (tr < r) {
            x = trial;
            img = ti;
            r = tr;
            moved = true;
            break;
          }
        } catch (const numerical_error&) {
        }
      }
      if (!moved) break;
    }
  } catch (const numerical_error& e) {
    res.message = std::string("polishing failed: ") + e.what();
    return res;
  }
  res.x0 = x;

  // Validation on a fresh sampled run over [0, qT].
  const radial_model m = pm.model.with_k(o.k);
  const std::size_t per = opt.samples_per_period;
  const auto samples = uniform_samples(0.0, q * pm.T, per * static_cast<std::size_t>(q));
  const auto tr = integrate_radial(m, x, 0.0, q * pm.T, samples, opt.ode);
  const auto& end = tr.x.back();
  res.residual = std::hypot(end[0] - x.r, end[1] - x.rdot);
  std::vector<double> dev;
  for (std::size_t i = 0; i + 1 < tr.x.size(); ++i) {  // [0, qT)
    res.t.push_back(tr.t[i]);
    res.r.push_back(tr.x[i][0]);
    dev.push_back(tr.x[i][0] - rbar);
  }
  res.t.push_back(tr.t.back());
  res.r.push_back(end[0]);
  res.zero_count = count_sign_changes(dev, opt.zero_cluster_tol);
  bool minimal = true;
  for (int l = 1; l < q; ++l) {
    const auto& xl = tr.x[per * static_cast<std::size_t>(l)];
    const bool ok = std::hypot(xl[0] - x.r, xl[1] - x.rdot) > opt.minimal_period_sep;
    res.minimal_period_check.push_back(ok);
    minimal = minimal && ok;
  }
  res.found = res.residual <= opt.residual_tol && res.zero_count == 2 * p && minimal;
  if (!res.found) {
    res.message = "candidate rejected: residual " + std::to_string(res.residual) + ", sign changes " +
                  std::to_string(res.zero_count) + (minimal ? "" : ", period not minimal");
  }
  return res;
}

// Stability probe.

struct probe_options {
  std::size_t members = 200;
  std::uint64_t seed = 20240601;
  double escape = 0.5;  // deviation counted as an escape
  std::size_t samples_per_period = 16;
  ode_options ode{1e-9, 1e-13};
  std::size_t workers = 0;  // 0: WIREFIELD_THREADS / hardware
};

struct probe_member {
  std::array<double, 4> perturbation{};  // (dr, dr', dL, dp_z)
  double max_excursion = 0.0;            // sup |r~ - r_k|
  double max_phase_excursion = 0.0;      // sup |r~ - r_k| + |r~' - r_k'|
  bool collided = false;
  bool escaped = false;
};

struct stability_probe {
  double delta = 0.0;
  std::size_t horizon = 0;  // periods
  double max_excursion = 0.0;
  double max_phase_excursion = 0.0;
  std::size_t collisions = 0;
  std::size_t escapes = 0;
  std::vector<probe_member> members;
};

/// Uniform samples of the 4-ball of radius delta, drawn up front so results do not depend on scheduling.
inline std::vector<std::array<double, 4>> ball_samples(std::size_t n, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::vector<std::array<double, 4>> out(n);
  for (auto& v : out) {
    double norm = 0.0;
    for (auto& c : v) {
      c = normal(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    const double s = delta * std::pow(unit(rng), 0.25) / norm;
    for (auto& c : v) c *= s;
  }
  return out;
}

inline stability_probe run_stability_probe(const periodic_orbit& o, const radial_model& model, double delta,
                                           std::size_t horizon, const probe_options& opt = {}) {
  stability_probe rep;
  rep.delta = delta;
  rep.horizon = horizon;
  const radial_model centre = model.with_k(o.k);
  const auto pert = ball_samples(opt.members, delta, opt.seed);
  rep.members.resize(opt.members);
  const auto samples = uniform_samples(0.0, static_cast<double>(horizon) * o.T, horizon * opt.samples_per_period);
  struct stop {};
  parallel_for(
      opt.members,
      [&](std::size_t i) {
        probe_member& mem = rep.members[i];
        mem.perturbation = pert[i];
        const radial_model other = centre.with_momenta({centre.L + pert[i][2], centre.p_z + pert[i][3]});
        const std::array<double, 4> x0{o.x0.r, o.x0.rdot, pert[i][0], pert[i][1]};
        auto observe = [&](double, const std::array<double, 4>& x) {
          mem.max_excursion = std::max(mem.max_excursion, std::abs(x[2]));
          mem.max_phase_excursion = std::max(mem.max_phase_excursion, std::abs(x[2]) + std::abs(x[3]));
          if (mem.max_excursion > opt.escape) throw stop{};
        };
        try {
          integrate_dense<4>(pair_system{&centre, &other}, x0, 0.0, static_cast<double>(horizon) * o.T, samples,
                             observe, pair_radius, opt.ode);
        } catch (const stop&) {
          mem.escaped = true;
        } catch (const collision&) {
          mem.collided = true;
        } catch (const step_underflow&) {
          mem.collided = true;
        }
      },
      opt.workers ? opt.workers : worker_count());
  for (const auto& mem : rep.members) {
    rep.max_excursion = std::max(rep.max_excursion, mem.max_excursion);
    rep.max_phase_excursion = std::max(rep.max_phase_excursion, mem.max_phase_excursion);
    rep.collisions += mem.collided;
    rep.escapes += mem.escaped;
  }
  return rep;
}

}  // namespace wirefield
