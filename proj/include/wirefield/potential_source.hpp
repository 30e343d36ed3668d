#pragma once

// Where the dynamics gets a(t, r) from: direct quadrature, or a per-run radial table.
//
// The table stores, for every harmonic of I, the complex radial kernel W_m(r) and its
// r-derivatives as separate Chebyshev series; the time dependence exp(i m w t) stays exact.

#include <algorithm>
#include <complex>
#include <memory>
#include <vector>

#include "wirefield/chebyshev.hpp"
#include "wirefield/potential.hpp"

namespace wirefield {

class potential_source {
 public:
  virtual ~potential_source() = default;
  virtual const current_profile& profile() const = 0;
  virtual double c() const = 0;
  /// d^i_t d^j_r a(t, r) for j = 0..max_dr.
  virtual radial_partials partials(double t, double r, int dt_order, int max_dr) const = 0;
};

class exact_potential final : public potential_source {
 public:
  explicit exact_potential(potential_field field) : field_(std::move(field)) {}
  const current_profile& profile() const override { return field_.profile(); }
  double c() const override { return field_.c(); }
  const potential_field& field() const { return field_; }
  radial_partials partials(double t, double r, int dt_order, int max_dr) const override {
    return wirefield::partials(field_, t, r, dt_order, max_dr);
  }

 private:
  potential_field field_;
};

struct table_config {
  double r_lo = 0.4;
  double r_hi = 2.5;
  /// Target absolute error of each tabulated kernel derivative, scaled by max(1, (mu/c)^j).
  double tolerance = 1e-11;
  std::size_t initial_intervals = 32;
  std::size_t max_intervals = 2048;
};

class tabulated_potential final : public potential_source {
 public:
  static constexpr int orders = potential_field::max_dr_order + 1;

  explicit tabulated_potential(potential_field field, table_config cfg = {})
      : field_(std::move(field)), cfg_(cfg) {
    if (!(cfg_.r_lo > 0.0 && cfg_.r_hi > cfg_.r_lo)) throw validation_error("table radius range must satisfy 0 < r_lo < r_hi");
    const auto& P = field_.profile();
    if (P.has_mean()) throw invalid_profile("the retarded potential of a current with nonzero mean diverges");
    quadrature_config q = field_.quad();
    q.abs_tol = 0.1 * cfg_.tolerance;
    q.tail = tail_method::contour;
    const potential_field kernel_field(P, field_.c(), q);
    for (std::size_t m = 1; m <= P.harmonics(); ++m) {
      if (std::abs(P.amplitude(m)) == 0.0) continue;
      harmonics_.push_back(build(kernel_field, m));
    }
  }

  const current_profile& profile() const override { return field_.profile(); }
  double c() const override { return field_.c(); }
  const table_config& config() const { return cfg_; }

  bool covers(double r) const { return r >= cfg_.r_lo && r <= cfg_.r_hi; }

  /// Worst certified interpolation error of derivative order j over all harmonics, weighted by |alpha_m|.
  double interpolation_error(int j) const {
    double e = 0.0;
    for (const auto& h : harmonics_) e += std::abs(h.alpha) * h.error[static_cast<std::size_t>(j)];
    return e;
  }

  std::size_t intervals(std::size_t harmonic_index) const { return harmonics_.at(harmonic_index).intervals; }

  radial_partials partials(double t, double r, int dt_order, int max_dr) const override {
    if (!covers(r)) return wirefield::partials(field_, t, r, dt_order, max_dr);
    detail::check_orders(dt_order, max_dr);
    radial_partials out;
    out.dt_order = dt_order;
    out.max_dr = max_dr;
    const std::complex<double> I(0.0, 1.0);
    for (const auto& h : harmonics_) {
      std::complex<double> weight = h.alpha * std::complex<double>(std::cos(h.mu * t), std::sin(h.mu * t));
      for (int i = 0; i < dt_order; ++i) weight *= I * h.mu;
      for (int j = 0; j <= max_dr; ++j) {
        const auto J = static_cast<std::size_t>(j);
        out.d[J] += weight.real() * h.re[J](r) - weight.imag() * h.im[J](r);
        out.error[J] += std::abs(weight) * h.error[J];
      }
    }
    return out;
  }

 private:
  struct harmonic {
    std::complex<double> alpha;
    double mu = 0.0;
    std::array<chebyshev_series, orders> re, im;
    std::array<double, orders> error{};
    std::size_t intervals = 0;
  };

  harmonic build(const potential_field& kf, std::size_t m) const {
    harmonic h;
    h.alpha = kf.profile().amplitude(m);
    h.mu = static_cast<double>(m) * kf.profile().angular_frequency();
    const double a = cfg_.r_lo, b = cfg_.r_hi;
    auto sample = [&](double r) { return kernel(kf, h.mu, r, potential_field::max_dr_order); };

    std::size_t N = cfg_.initial_intervals;
    std::vector<harmonic_kernel> vals(N + 1);
    for (std::size_t k = 0; k <= N; ++k) vals[k] = sample(chebyshev_series::node(a, b, k, N));
    std::array<double, orders> tol{};
    for (int j = 0; j < orders; ++j) tol[static_cast<std::size_t>(j)] = cfg_.tolerance * std::max(1.0, std::pow(h.mu / kf.c(), j));

    for (;;) {
      bool ok = true;
      for (int j = 0; j < orders; ++j) {
        const auto J = static_cast<std::size_t>(j);
        std::vector<double> vr(N + 1), vi(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
          vr[k] = vals[k].d[J].real();
          vi[k] = vals[k].d[J].imag();
        }
        h.re[J] = chebyshev_series::from_lobatto(a, b, vr);
        h.im[J] = chebyshev_series::from_lobatto(a, b, vi);
        if (h.re[J].tail() + h.im[J].tail() > 0.1 * tol[J]) ok = false;
      }
      if (ok || 2 * N > cfg_.max_intervals) break;
      std::vector<harmonic_kernel> finer(2 * N + 1);
      for (std::size_t k = 0; k <= 2 * N; ++k)
        finer[k] = (k % 2 == 0) ? vals[k / 2] : sample(chebyshev_series::node(a, b, k, 2 * N));
      vals = std::move(finer);
      N *= 2;
    }
    h.intervals = N;

    // Certify on points halfway between nodes against direct quadrature.
    std::array<double, orders> worst{};
    for (std::size_t k = 0; k < N; k += std::max<std::size_t>(1, N / 16)) {
      const double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(N));
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * x;
      const auto K = sample(r);
      for (std::size_t J = 0; J < orders; ++J) {
        const double d = std::abs(std::complex<double>(h.re[J](r), h.im[J](r)) - K.d[J]) + K.error[J];
        worst[J] = std::max(worst[J], d);
      }
    }
    for (std::size_t J = 0; J < orders; ++J) h.error[J] = std::max(worst[J], h.re[J].tail() + h.im[J].tail());
    return h;
  }

  potential_field field_;
  table_config cfg_;
  std::vector<harmonic> harmonics_;
};

/// Table sized for motion near rbar.
inline std::shared_ptr<const potential_source> make_table(const potential_field& field, double rbar,
                                                          double tolerance = 1e-11) {
  table_config cfg;
  cfg.r_lo = 0.4 * rbar;
  cfg.r_hi = 2.5 * rbar;
  cfg.tolerance = tolerance;
  return std::make_shared<tabulated_potential>(field, cfg);
}

}  // namespace wirefield
