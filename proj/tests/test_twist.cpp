#include <cmath>
#include <numbers>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fd_oracle.hpp"
#include "wirefield/twist.hpp"

using namespace wirefield;

namespace {

const triplet standard{1.0, 1.0, 1.0, 1.0};

const period_map_problem& problem() {
  static const period_map_problem pm{make_model(make_table(potential_field(sinusoid(1.0, 0.0, 0.5)), 1.0), {1.0, 1.0}),
                                     0.5, {}};
  return pm;
}

const periodic_orbit& orbit(double k) {
  static std::map<double, periodic_orbit> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, newton_shoot(problem(), {1.0, 0.0}, k)).first;
  return it->second;
}

}  // namespace

TEST(Twist, LimitValuesOfStandardTriplet) {
  const auto l = limit_values(standard);
  EXPECT_NEAR(l.A, 3.0, 1e-15);
  EXPECT_NEAR(l.B, -6.5, 1e-15);
  EXPECT_NEAR(l.C, 65.0 / 6.0, 1e-14);
}

TEST(Twist, EquilibriumCoefficientsAreConstant) {
  const auto c = compute_coefficients(orbit(0.0), problem().model, standard);
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    EXPECT_NEAR(c.A[i], 3.0, 1e-9);
    EXPECT_NEAR(c.B[i], -6.5, 1e-9);
    EXPECT_NEAR(c.C[i], 65.0 / 6.0, 1e-9);
    EXPECT_NEAR(c.A[i], effective_potential(problem().model.with_k(0.0), c.t[i], 1.0)[2], 1e-12);
  }
}

TEST(Twist, EquilibriumIsCertifiedWithKnownMargins) {
  const auto& o = orbit(0.0);
  const auto z = check_twist(compute_coefficients(o, problem().model, standard), o);
  EXPECT_TRUE(z.certified());
  EXPECT_NEAR(z.margin_i, std::numbers::pi * std::numbers::pi - 3.0, 1e-9);
  EXPECT_NEAR(z.margin_ii, 65.0 / 6.0, 1e-9);
  EXPECT_NEAR(z.margin_iii, 130.0, 1e-7);
  EXPECT_NEAR(z.rotation_bound, std::sqrt(3.0) * 0.5 / (2 * std::numbers::pi), 1e-9);
}

TEST(Twist, LongPeriodFailsFirstCondition) {
  const auto c = compute_coefficients(orbit(0.0), problem().model, standard);
  const auto z = check_twist(c, 2.0);
  EXPECT_FALSE(z.condition_i);
  EXPECT_NEAR(z.margin_i, std::pow(std::numbers::pi / 4, 2) - 3.0, 1e-9);
  EXPECT_FALSE(z.certified());
}

TEST(Twist, TaylorCoefficientsMatchFiniteDifferences) {
  const double k = 0.01;
  const auto& o = orbit(k);
  const auto m = problem().model.with_k(k);
  const auto c = compute_coefficients(o, problem().model, standard);
  for (std::size_t i = 0; i < c.t.size(); i += 4) {
    const auto fd = fd_oracle::coefficients(m, c.t[i], o.r[i]);
    EXPECT_NEAR(c.A[i], fd.A, 1e-5);
    EXPECT_NEAR(c.B[i], fd.B, 1e-5);
    EXPECT_NEAR(c.C[i], fd.C, 1e-5);
  }
}

TEST(Twist, UnweightedVariantAgreesOnlyAtZero) {
  const auto c0 = compute_coefficients(orbit(0.0), problem().model, standard, twist_formula::unweighted);
  for (std::size_t i = 0; i < c0.t.size(); ++i) EXPECT_NEAR(c0.C[i], 65.0 / 6.0, 1e-9);
  const auto& o = orbit(0.01);
  const auto t = compute_coefficients(o, problem().model, standard, twist_formula::taylor);
  const auto u = compute_coefficients(o, problem().model, standard, twist_formula::unweighted);
  double diff = 0.0;
  for (std::size_t i = 0; i < t.t.size(); ++i) diff = std::max(diff, std::abs(t.C[i] - u.C[i]));
  EXPECT_GT(diff, 1.0);
  // For A the weight is 1, so the two differ only by the doubled k^2 term k^2 (a_r^2 + a a_rr).
  const auto m = problem().model.with_k(0.01);
  for (std::size_t i = 0; i < t.t.size(); ++i) {
    const auto p = m.source->partials(t.t[i], o.r[i], 0, 2);
    EXPECT_NEAR(u.A[i] - t.A[i], 1e-4 * (p.d[1] * p.d[1] + p.d[0] * p.d[2]), 1e-8);
  }
}

TEST(Twist, LimitInequalityHoldsForRandomTriplets) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    const auto t = complete_triplet(u(rng), u(rng) * (i % 2 ? 1.0 : -1.0), i % 4 ? 1 : -1);
    const auto l = limit_values(t);
    EXPECT_GT(10 * l.B * l.B, 9 * l.C * l.A);
  }
}

TEST(Twist, ResidualsShrinkWithK) {
  double prev = 1e300;
  for (double k : {1e-2, 1e-3, 1e-4}) {
    const auto c = compute_coefficients(orbit(k), problem().model, standard);
    const double x = twist_coefficients::sup_abs(c.xi_A);
    EXPECT_LE(x, prev);
    prev = x;
  }
}

TEST(Twist, RotationAngleAtEquilibriumIsRootAbarT) {
  EXPECT_NEAR(orbit(0.0).rotation_angle, std::sqrt(3.0) * 0.5, 1e-8);
}

TEST(Twist, ThresholdOnSinusoidalBranch) {
  const auto b = continue_in_k(problem(), standard, {1e-4, 1e-3, 1e-2});
  const auto k1 = twist_threshold(b, problem().model, standard);
  ASSERT_TRUE(k1.has_value());
  EXPECT_EQ(*k1, 1e-3);
}

TEST(Twist, EnvelopeWidensByHalfTheLargestJump) {
  const auto e = sampled_envelope({0.0, 1.0, 0.5});
  EXPECT_DOUBLE_EQ(e.inf, -0.5);
  EXPECT_DOUBLE_EQ(e.sup, 1.5);
}

TEST(Twist, SignChangingBGivesZeroInfimum) {
  twist_coefficients c;
  c.A = {3.0, 3.0};
  c.B = {-1.0, 1.0};
  c.C = {1.0, 1.0};
  EXPECT_EQ(check_twist(c, 0.5).B_inf_sq, 0.0);
}
