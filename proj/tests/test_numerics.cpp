#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "wirefield/chebyshev.hpp"
#include "wirefield/jet.hpp"
#include "wirefield/quadrature.hpp"

using namespace wirefield;
using namespace wirefield::quadrature;

TEST(Jet, ProductAndCompositionMatchHandDerivatives) {
  const auto x = jet<3>::variable(0.7);
  const auto f = x * x * log(x);  // x^2 ln x
  const double l = std::log(0.7);
  EXPECT_NEAR(f.derivative(0), 0.49 * l, 1e-15);
  EXPECT_NEAR(f.derivative(1), 2 * 0.7 * l + 0.7, 1e-14);
  EXPECT_NEAR(f.derivative(2), 2 * l + 3, 1e-14);
  EXPECT_NEAR(f.derivative(3), 2 / 0.7, 1e-13);
}

TEST(Jet, SqrtAndExpRoundTrip) {
  const auto x = jet<4>::variable(1.3);
  const auto y = sqrt(x) * sqrt(x);
  for (int j = 0; j <= 4; ++j) EXPECT_NEAR(y.derivative(j), x.derivative(j), 1e-13);
  const auto z = log(exp(x));
  for (int j = 0; j <= 4; ++j) EXPECT_NEAR(z.derivative(j), x.derivative(j), 1e-13);
}

TEST(Quadrature, GaussKronrodIntegratesPolynomialsAndOscillations) {
  const std::vector<double> unit{0.0, 2.0};
  const auto p = integrate<1>([](double x) { return std::array<double, 1>{x * x * x * x}; }, unit, {1e-13}, 10000);
  EXPECT_NEAR(p.value[0], 32.0 / 5.0, 1e-13);
  const auto breaks = uniform_breaks(0.0, 10.0, 1.0);
  const auto s = integrate<2>([](double x) { return std::array<double, 2>{std::sin(x), std::cos(x)}; }, breaks,
                              {1e-12, 1e-12}, 100000);
  EXPECT_NEAR(s.value[0], 1.0 - std::cos(10.0), 1e-12);
  EXPECT_NEAR(s.value[1], std::sin(10.0), 1e-12);
}

TEST(Chebyshev, InterpolatesSmoothFunction) {
  const std::size_t N = 32;
  std::vector<double> v(N + 1);
  for (std::size_t k = 0; k <= N; ++k) v[k] = std::exp(chebyshev_series::node(0.5, 2.0, k, N));
  const auto s = chebyshev_series::from_lobatto(0.5, 2.0, v);
  for (double x = 0.5; x <= 2.0; x += 0.0137) EXPECT_NEAR(s(x), std::exp(x), 1e-14);
  EXPECT_LT(s.tail(), 1e-15);
}
