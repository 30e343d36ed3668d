#pragma once

// Wire current J(t) = (I0 + k I(t)) z, with I a real trigonometric polynomial of period T.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "wirefield/errors.hpp"

namespace wirefield {

/// I(t) = mean + sum_n cos_coeffs[n-1] cos(n w t) + sin_coeffs[n-1] sin(n w t), w = 2 pi / T.
struct fourier_series {
  double mean = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  bool identically_zero() const {
    auto zero = [](double x) { return x == 0.0; };
    return mean == 0.0 && std::all_of(cos_coeffs.begin(), cos_coeffs.end(), zero) &&
           std::all_of(sin_coeffs.begin(), sin_coeffs.end(), zero);
  }
};

class current_profile {
 public:
  /// Highest derivative order exposed by eval_current (the twist analysis needs C^4).
  static constexpr int max_order = 4;

  current_profile(double I0, double k, double period, fourier_series waveform)
      : I0_(I0), k_(k), period_(period), waveform_(std::move(waveform)) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
      throw invalid_profile("period T must be positive and finite");
    if (I0_ == 0.0 || !std::isfinite(I0_)) throw invalid_profile("base current I0 must be nonzero (I0 != 0)");
    if (!std::isfinite(k_)) throw invalid_profile("perturbation amplitude k must be finite");
    auto n = std::max(waveform_.cos_coeffs.size(), waveform_.sin_coeffs.size());
    waveform_.cos_coeffs.resize(n, 0.0);
    waveform_.sin_coeffs.resize(n, 0.0);
    omega_ = 2.0 * std::numbers::pi / period_;
  }

  double I0() const { return I0_; }
  double k() const { return k_; }
  double period() const { return period_; }
  double angular_frequency() const { return omega_; }
  const fourier_series& waveform() const { return waveform_; }
  std::size_t harmonics() const { return waveform_.cos_coeffs.size(); }
  bool has_mean() const { return waveform_.mean != 0.0; }
  bool identically_zero() const { return waveform_.identically_zero(); }

  /// Highest harmonic frequency with a nonzero coefficient (0 if none).
  double max_frequency() const {
    for (std::size_t n = harmonics(); n > 0; --n)
      if (waveform_.cos_coeffs[n - 1] != 0.0 || waveform_.sin_coeffs[n - 1] != 0.0)
        return static_cast<double>(n) * omega_;
    return 0.0;
  }

  /// Complex amplitude of harmonic n >= 1: the harmonic equals Re[amplitude * exp(i n w t)].
  std::complex<double> amplitude(std::size_t n) const {
    return {waveform_.cos_coeffs[n - 1], -waveform_.sin_coeffs[n - 1]};
  }

  /// d^n I / dt^n for n >= 0; n = -1 is the zero-mean primitive, n = -2 the zero-mean second primitive.
  double derivative(int n, double t) const {
    if (n < 0 && has_mean()) throw invalid_profile("a current with nonzero mean has no periodic primitive");
    double sum = (n == 0) ? waveform_.mean : 0.0;
    // d^n/dt^n [c cos x + s sin x] with x = m w t equals (m w)^n [c cos(x + n pi/2) + s sin(x + n pi/2)].
    const int q = ((n % 4) + 4) % 4;
    // Reduce t to [0, T) first so that t and t + T give the same phases up to one rounding.
    const double tr = t - period_ * std::floor(t / period_);
    for (std::size_t m = 1; m <= harmonics(); ++m) {
      const double c = waveform_.cos_coeffs[m - 1];
      const double s = waveform_.sin_coeffs[m - 1];
      if (c == 0.0 && s == 0.0) continue;
      const double mu = static_cast<double>(m) * omega_;
      const double x = mu * tr;
      const double cx = std::cos(x), sx = std::sin(x);
      double cos_shift = cx, sin_shift = sx;  // cos(x + q pi/2), sin(x + q pi/2)
      switch (q) {
        case 1: cos_shift = -sx; sin_shift = cx; break;
        case 2: cos_shift = -cx; sin_shift = -sx; break;
        case 3: cos_shift = sx; sin_shift = -cx; break;
        default: break;
      }
      sum += std::pow(mu, n) * (c * cos_shift + s * sin_shift);
    }
    return sum;
  }

  /// Upper bound of sup_t |d^n I/dt^n| (n >= -2), from the coefficient moduli.
  double sup_bound(int n) const {
    double b = (n == 0) ? std::abs(waveform_.mean) : 0.0;
    for (std::size_t m = 1; m <= harmonics(); ++m) {
      const double mu = static_cast<double>(m) * omega_;
      b += std::pow(mu, n) * std::hypot(waveform_.cos_coeffs[m - 1], waveform_.sin_coeffs[m - 1]);
    }
    return b;
  }

  /// Total wire current I0 + k I(t).
  double total(double t) const { return I0_ + k_ * derivative(0, t); }

 private:
  double I0_;
  double k_;
  double period_;
  double omega_ = 0.0;
  fourier_series waveform_;
};

/// d^order I / dt^order at t, order in 0..4.
inline double eval_current(const current_profile& profile, double t, int order) {
  if (order < 0 || order > current_profile::max_order)
    throw unsupported_order("current derivative of order " + std::to_string(order) + " is not available (0..4)");
  return profile.derivative(order, t);
}

/// The zero-mean antiderivative of I.
inline double eval_primitive(const current_profile& profile, double t) { return profile.derivative(-1, t); }

struct validation_report {
  double periodicity_defect = 0.0;
  double mean = 0.0;
  double tolerance = 1e-10;
  bool passed = false;
};

/// Periodicity defect on a sample grid and mean by composite trapezoid quadrature.
inline validation_report validate(const current_profile& profile, double tolerance = 1e-10) {
  if (!(profile.period() > 0.0)) throw invalid_profile("period T must be positive");
  if (profile.I0() == 0.0) throw invalid_profile("base current I0 must be nonzero");
  validation_report rep;
  rep.tolerance = tolerance;
  const double T = profile.period();
  constexpr int samples = 64;
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / samples;
    rep.periodicity_defect = std::max(rep.periodicity_defect, std::abs(profile.derivative(0, t + T) - profile.derivative(0, t)));
  }
  // The trapezoid rule on a full period is exact for trigonometric polynomials of degree < nodes.
  const int nodes = std::max<int>(256, 4 * static_cast<int>(profile.harmonics()) + 4);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) sum += profile.derivative(0, T * i / nodes);
  rep.mean = sum / nodes;
  rep.passed = rep.periodicity_defect <= tolerance && std::abs(rep.mean) <= tolerance;
  return rep;
}

// Built-in profiles.

/// I(t) = amplitude * sin(2 pi t / T).
inline current_profile sinusoid(double I0, double k, double period, double amplitude = 1.0) {
  fourier_series w;
  w.sin_coeffs = {amplitude};
  return {I0, k, period, std::move(w)};
}

inline current_profile fourier(double I0, double k, double period, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs) {
  fourier_series w;
  w.cos_coeffs = std::move(cos_coeffs);
  w.sin_coeffs = std::move(sin_coeffs);
  return {I0, k, period, std::move(w)};
}

/// Square wave sign(sin(2 pi t/T)) smoothed by five box convolutions of width `smoothing` (fraction of T),
/// truncated to `harmonics` terms. Coefficients decay like n^-6, so the untruncated wave is C^4.
inline current_profile smoothed_square(double I0, double k, double period, int harmonics = 15,
                                       double smoothing = 0.05) {
  if (harmonics < 1) throw invalid_profile("smoothed square wave needs at least one harmonic");
  if (!(smoothing > 0.0 && smoothing < 1.0)) throw invalid_profile("smoothing width must lie in (0, 1)");
  fourier_series w;
  w.sin_coeffs.assign(static_cast<std::size_t>(harmonics), 0.0);
  for (int n = 1; n <= harmonics; n += 2) {
    const double x = std::numbers::pi * n * smoothing;
    const double sinc = std::sin(x) / x;
    w.sin_coeffs[static_cast<std::size_t>(n - 1)] = 4.0 / (std::numbers::pi * n) * std::pow(sinc, 5);
  }
  return {I0, k, period, std::move(w)};
}

}  // namespace wirefield
