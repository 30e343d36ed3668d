#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wirefield/em_fields.hpp"
#include "wirefield/potential_source.hpp"

using namespace wirefield;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double bessel_a(double t, double r) {
  return 0.5 * std::numbers::pi * (std::sin(t) * std::cyl_neumann(0.0, r) + std::cos(t) * std::cyl_bessel_j(0.0, r));
}

double bessel_a_r(double t, double r) {
  return -0.5 * std::numbers::pi * (std::sin(t) * std::cyl_neumann(1.0, r) + std::cos(t) * std::cyl_bessel_j(1.0, r));
}

potential_field sine_field(double tol = 1e-9) {
  quadrature_config q;
  q.abs_tol = tol;
  return potential_field(sinusoid(1.0, 1.0, two_pi), 1.0, q);
}

}  // namespace

TEST(BesselOracle, LibraryMatchesTabulatedValues) {
  EXPECT_NEAR(std::cyl_bessel_j(0.0, 1.0), 0.7651976865579666, 1e-15);
  EXPECT_NEAR(std::cyl_neumann(0.0, 1.0), 0.08825696421567696, 1e-15);
  EXPECT_NEAR(std::cyl_bessel_j(1.0, 1.0), 0.44005058574493355, 1e-15);
  EXPECT_NEAR(std::cyl_neumann(1.0, 1.0), -0.7812128213002887, 1e-15);
}

TEST(Potential, StaticPartIsLogarithm) {
  EXPECT_EQ(a0(potential_field(sinusoid(1.0, 0.0, 1.0)), 1.0), 0.0);
  EXPECT_NEAR(a0(potential_field(sinusoid(2.0, 0.0, 1.0)), std::exp(1.0)), 2.0, 1e-15);
  EXPECT_THROW(a0(potential_field(sinusoid(1.0, 0.0, 1.0)), 0.0), wire_singularity);
  EXPECT_THROW(a(sine_field(), 0.0, -1.0), wire_singularity);
}

TEST(Potential, MatchesBesselClosedForm) {
  const auto f = sine_field(1e-10);
  for (double t : {0.0, 1.0, 2.0})
    for (double r : {0.5, 1.0, 5.0}) {
      const auto e = a(f, t, r);
      EXPECT_NEAR(e.value, bessel_a(t, r), 1e-8) << t << " " << r;
      EXPECT_LE(e.error, 1e-8);
    }
}

TEST(Potential, RadialDerivativeMatchesBesselIdentity) {
  const auto f = sine_field();
  for (double t : {0.0, 0.7, 2.5})
    for (double r : {0.5, 1.3, 4.0}) EXPECT_NEAR(a_partial(f, t, r, 0, 1).value, bessel_a_r(t, r), 1e-7);
}

TEST(Potential, ReportedErrorBoundsActualError) {
  const auto f = sine_field(1e-6);
  for (double t : {0.3, 4.0})
    for (double r : {0.6, 2.0, 7.0}) {
      const auto e = a(f, t, r);
      EXPECT_LE(std::abs(e.value - bessel_a(t, r)), std::max(e.error, 1e-14));
    }
}

TEST(Potential, PeriodicInTime) {
  const potential_field f(fourier(1.0, 1.0, 0.5, {0.2}, {1.0, 0.3}));
  for (double t : {0.0, 0.13, 0.41})
    for (double r : {0.5, 1.0, 2.0}) EXPECT_NEAR(a(f, t + 0.5, r).value, a(f, t, r).value, 1e-10);
}

TEST(Potential, PartialsAgreeWithFiniteDifferences) {
  const potential_field f(fourier(1.0, 1.0, two_pi, {0.2}, {1.0, 0.3}), 1.0, quadrature_config{1e-12});
  const double h = 1e-4;
  for (double t : {0.05, 2.3})
    for (double r : {0.7, 1.5}) {
      const double fd_r = (a(f, t, r + h).value - a(f, t, r - h).value) / (2 * h);
      EXPECT_NEAR(a_partial(f, t, r, 0, 1).value, fd_r, 1e-6);
      const double fd_t = (a(f, t + h, r).value - a(f, t - h, r).value) / (2 * h);
      EXPECT_NEAR(a_partial(f, t, r, 1, 0).value, fd_t, 1e-6 * std::max(1.0, std::abs(fd_t)));
      // Higher orders through differences of the next lower analytic order.
      for (int j = 1; j <= 3; ++j) {
        const double up = a_partial(f, t, r + h, 0, j).value, dn = a_partial(f, t, r - h, 0, j).value;
        const double d = a_partial(f, t, r, 0, j + 1).value;
        EXPECT_NEAR(d, (up - dn) / (2 * h), 1e-5 * std::max(1.0, std::abs(d)));
      }
      const double mixed = (a_partial(f, t + h, r, 0, 1).value - a_partial(f, t - h, r, 0, 1).value) / (2 * h);
      EXPECT_NEAR(a_partial(f, t, r, 1, 1).value, mixed, 1e-5 * std::max(1.0, std::abs(mixed)));
    }
}

TEST(Potential, ZeroCurrentGivesZeroForAllOrders) {
  const potential_field f(fourier(1.0, 1.0, 1.0, {}, {}));
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; i + j <= 4; ++j) EXPECT_EQ(a_partial(f, 0.3, 1.2, i, j).value, 0.0);
  EXPECT_EQ(wave_residual(f, 0.3, 1.2).value, 0.0);
}

TEST(Potential, OrderLimitsAreEnforced) {
  const auto f = sine_field();
  EXPECT_THROW(a_partial(f, 0.0, 1.0, 3, 0), unsupported_order);
  EXPECT_THROW(a_partial(f, 0.0, 1.0, 0, 5), unsupported_order);
  EXPECT_THROW(a_partial(f, 0.0, 1.0, 2, 3), unsupported_order);
}

TEST(Potential, WaveResidualVanishes) {
  const auto f = sine_field();
  EXPECT_NEAR(wave_residual(f, 0.0, 1.0).value, 0.0, 1e-5);
  const potential_field g(fourier(1.0, 1.0, 0.5, {0.2}, {1.0, 0.3}), 2.0);
  for (double t : {0.1, 0.37})
    for (double r : {0.5, 1.1, 3.0}) EXPECT_NEAR(wave_residual(g, t, r).value, 0.0, 1e-4);
  EXPECT_EQ(static_laplacian(f, 0.7), 0.0);
}

TEST(Potential, IntegrationByPartsTailAgreesWithContour) {
  quadrature_config q;
  q.abs_tol = 1e-8;
  q.tail = tail_method::integration_by_parts;
  const potential_field ibp(sinusoid(1.0, 1.0, two_pi), 1.0, q);
  const auto contour = sine_field(1e-10);
  for (double t : {0.2, 1.9})
    for (double r : {0.8, 2.0}) {
      const auto x = partials(ibp, t, r, 0, 2), y = partials(contour, t, r, 0, 2);
      for (int j = 0; j <= 2; ++j) EXPECT_NEAR(x.d[j], y.d[j], 1e-7);
      EXPECT_NEAR(x.d[0], bessel_a(t, r), std::max(x.error[0], 1e-12) + 1e-10);
    }
}

TEST(Potential, QuasiStaticLimitRecoversInstantaneousBiotSavart) {
  // Slow current: B_theta -> (I0 + k I(t)) / r near the wire.
  const double T = 2000.0, k = 0.3;
  const potential_field f(sinusoid(1.0, k, T));
  const double t = T / 4, r = 0.5;
  const auto s = field_eval(f, t, r);
  EXPECT_NEAR(s.B.theta, (1.0 + k * eval_current(f.profile(), t, 0)) / r, 1e-3);
}

TEST(Potential, BudgetExhaustionCarriesBestEstimate) {
  quadrature_config q;
  q.abs_tol = 1e-15;
  q.max_evaluations = 50;
  const potential_field f(sinusoid(1.0, 1.0, two_pi), 1.0, q);
  try {
    (void)a(f, 0.3, 1.0);
    FAIL() << "expected quadrature_budget";
  } catch (const quadrature_budget& e) {
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(PotentialTable, MatchesDirectQuadrature) {
  const potential_field f(sinusoid(1.0, 0.01, 0.5));
  const tabulated_potential tab(f, {0.4, 2.5, 1e-11});
  for (double r = 0.45; r < 2.45; r += 0.173)
    for (double t : {0.0, 0.11, 0.37}) {
      for (int i = 0; i <= 1; ++i) {
        const int jmax = i == 0 ? 4 : 1;
        const auto x = tab.partials(t, r, i, jmax), y = partials(f, t, r, i, jmax);
        for (int j = 0; j <= jmax; ++j) {
          const double scale = std::max(1.0, std::pow(4.0 * std::numbers::pi, i + j));
          EXPECT_NEAR(x.d[j], y.d[j], 1e-9 * scale) << "i=" << i << " j=" << j << " r=" << r;
        }
      }
    }
  for (int j = 0; j <= 4; ++j) EXPECT_LT(tab.interpolation_error(j), 1e-8 * std::pow(4.0 * std::numbers::pi, j));
}

TEST(PotentialTable, FallsBackOutsideRange) {
  const potential_field f(sinusoid(1.0, 0.01, 0.5));
  const tabulated_potential tab(f, {0.4, 2.5, 1e-10});
  EXPECT_FALSE(tab.covers(3.0));
  EXPECT_NEAR(tab.partials(0.1, 3.0, 0, 1).d[1], partials(f, 0.1, 3.0, 0, 1).d[1], 1e-12);
}

TEST(PotentialTable, RejectsNonzeroMean) {
  fourier_series w;
  w.mean = 0.5;
  w.sin_coeffs = {1.0};
  EXPECT_THROW(tabulated_potential(potential_field(current_profile(1.0, 0.1, 1.0, w))), invalid_profile);
}
