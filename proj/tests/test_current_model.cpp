#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wirefield/current_model.hpp"

using namespace wirefield;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TEST(CurrentModel, SineValueAndDerivative) {
  const auto p = sinusoid(1.0, 0.1, two_pi);
  EXPECT_NEAR(eval_current(p, std::numbers::pi / 2, 0), 1.0, 1e-15);
  EXPECT_NEAR(eval_current(p, 0.0, 1), 1.0, 1e-15);
  EXPECT_NEAR(eval_current(p, 0.3, 2), -std::sin(0.3), 1e-15);
  EXPECT_NEAR(eval_current(p, 0.3, 4), std::sin(0.3), 1e-15);
}

TEST(CurrentModel, PeriodicForEveryBuiltInProfile) {
  for (const auto& p : {sinusoid(1.0, 0.1, 0.5), fourier(2.0, 0.1, 1.7, {0.3, 0.0, -0.2}, {1.0, 0.5}),
                        smoothed_square(1.0, 0.1, 0.5)}) {
    for (double t : {0.0, 0.123, 0.77, 3.1})
      for (int n = 0; n <= 4; ++n) {
        // The n-th derivative carries the factor (m w)^n, so it is compared on its own scale.
        const double scale = std::max(1.0, p.sup_bound(n));
        EXPECT_NEAR(eval_current(p, t + p.period(), n), eval_current(p, t, n), 1e-14 * scale);
      }
  }
}

TEST(CurrentModel, OrderOutOfRangeThrows) {
  const auto p = sinusoid(1.0, 0.1, 1.0);
  EXPECT_THROW(eval_current(p, 0.0, 5), unsupported_order);
  EXPECT_THROW(eval_current(p, 0.0, -1), unsupported_order);
}

TEST(CurrentModel, PrimitiveOfSine) {
  const auto p = sinusoid(1.0, 0.1, two_pi);
  for (double t : {0.0, 0.4, 2.0, 5.5}) EXPECT_NEAR(eval_primitive(p, t), -std::cos(t), 1e-15);
}

TEST(CurrentModel, PrimitiveOfZeroCurrentIsZero) {
  const auto p = fourier(1.0, 0.1, 1.0, {}, {});
  for (double t : {0.0, 0.4, 2.0}) {
    EXPECT_EQ(eval_primitive(p, t), 0.0);
    EXPECT_EQ(eval_current(p, t, 0), 0.0);
  }
}

TEST(CurrentModel, PrimitiveDifferentiatesBackToCurrent) {
  const double h = 1e-5;
  const auto sine = sinusoid(1.0, 0.1, two_pi);
  for (double t = 0.0; t < two_pi; t += 0.37)
    EXPECT_NEAR((eval_primitive(sine, t + h) - eval_primitive(sine, t - h)) / (2 * h), eval_current(sine, t, 0), 1e-8);
  for (const auto& p : {sinusoid(1.0, 0.1, 0.5), fourier(2.0, 0.1, 1.7, {0.3, 0.0, -0.2}, {1.0, 0.5}),
                        smoothed_square(1.0, 0.1, 0.5)}) {
    for (double t = 0.0; t < p.period(); t += p.period() / 13) {
      const double fd = (eval_primitive(p, t + h) - eval_primitive(p, t - h)) / (2 * h);
      // Central-difference truncation h^2/6 sup|I''| plus rounding of the primitive values.
      const double tol = h * h / 6 * p.sup_bound(2) + 1e-16 * p.sup_bound(-1) / h + 1e-12;
      EXPECT_NEAR(fd, eval_current(p, t, 0), tol);
    }
  }
}

TEST(CurrentModel, PrimitiveHasZeroMean) {
  const auto p = fourier(1.0, 0.1, 2.0, {0.3, 0.1}, {1.0, 0.5});
  double s = 0.0;
  const int n = 512;
  for (int i = 0; i < n; ++i) s += eval_primitive(p, 2.0 * i / n);
  EXPECT_NEAR(s / n, 0.0, 1e-14);
}

TEST(CurrentModel, ValidationOutcomes) {
  EXPECT_TRUE(validate(sinusoid(1.0, 0.1, 0.5)).passed);
  fourier_series w;
  w.mean = 1.0;
  w.sin_coeffs = {1.0};
  const auto bad = validate(current_profile(1.0, 0.1, two_pi, w));
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.mean, 1.0, 1e-12);
  EXPECT_THROW(sinusoid(0.0, 0.1, 1.0), invalid_profile);
  EXPECT_THROW(sinusoid(1.0, 0.1, 0.0), invalid_profile);
  EXPECT_THROW(sinusoid(1.0, 0.1, -1.0), invalid_profile);
}

TEST(CurrentModel, SupBoundCoversSampledPrimitive) {
  const auto p = smoothed_square(1.0, 0.1, 0.5);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) worst = std::max(worst, std::abs(eval_primitive(p, 0.5 * i / 2000)));
  EXPECT_GE(p.sup_bound(-1), worst);
}
