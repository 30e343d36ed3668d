#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "wirefield/dynamics.hpp"

using namespace wirefield;

namespace {

radial_model unperturbed(double L, double p_z, double I0 = 1.0) {
  return make_model(potential_field(sinusoid(I0, 0.0, 0.5)), {L, p_z});
}

radial_model perturbed(double k) {
  static const auto table = make_table(potential_field(sinusoid(1.0, 0.0, 0.5)), 1.0);
  auto m = make_model(table, {1.0, 1.0});
  return m.with_k(k);
}

}  // namespace

TEST(Dynamics, RadialRightHandSideExamples) {
  EXPECT_EQ(radial_rhs(unperturbed(1.0, 1.0), 0.0, 1.0), 0.0);
  EXPECT_EQ(radial_rhs(unperturbed(0.0, 0.0), 0.0, 1.0), 0.0);
  EXPECT_NEAR(radial_rhs(unperturbed(0.0, 0.0), 0.0, std::exp(1.0)), -1.0 / std::exp(1.0), 1e-15);
}

TEST(Dynamics, CentrifugalPotentialOnly) {
  radial_model m;
  m.I0 = 0.0;
  m.L = 1.0;
  m.p_z = 0.0;
  EXPECT_NEAR(effective_potential(m, 0.0, 1.0)[0], 0.5, 1e-15);
}

TEST(Dynamics, ForceIsMinusPotentialGradient) {
  const auto m = perturbed(0.05);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> T(0.0, 0.5), R(0.5, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double t = T(rng), r = R(rng);
    EXPECT_NEAR(-effective_potential(m, t, r)[1], radial_rhs(m, t, r), 1e-9);
    const auto fs = radial_rhs_and_slope(m, t, r);
    EXPECT_NEAR(fs[1], -effective_potential(m, t, r)[2], 1e-9);
  }
}

TEST(Dynamics, EquilibriumStaysPut) {
  const auto m = unperturbed(1.0, 1.0);
  const auto s = uniform_samples(0.0, 50.0, 500);
  const auto tr = integrate_radial(m, {1.0, 0.0}, 0.0, 50.0, s);
  for (const auto& x : tr.x) EXPECT_NEAR(x[0], 1.0, 1e-8);
}

TEST(Dynamics, HelixAtZeroPerturbation) {
  const double rbar = 1.3;
  const auto m = unperturbed(0.8, 0.4);
  // Circular orbit requires L^2 = rbar^2 I0 (p_z + I0 ln rbar); choose p_z accordingly.
  const double pz = 0.8 * 0.8 / (rbar * rbar) - std::log(rbar);
  const auto h = m.with_momenta({0.8, pz});
  const auto s = uniform_samples(0.0, 10.0, 100);
  const auto tr = integrate_cartesian(h, cartesian_initial(h, 0.0, {rbar, 0.0}), 0.0, 10.0, s);
  const double rate = pz + std::log(rbar);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    EXPECT_NEAR(std::hypot(tr.x[i][0], tr.x[i][1]), rbar, 1e-8);
    EXPECT_NEAR(tr.x[i][2], rate * tr.t[i], 1e-8);
  }
}

TEST(Dynamics, CartesianAndRadialFormulationsAgree) {
  const auto m = perturbed(0.05);
  const double t1 = 5.0;
  const auto s = uniform_samples(0.0, t1, 200);
  const radial_state x0{1.05, 0.02};
  const auto rad = integrate_radial(m, x0, 0.0, t1, s);
  const auto car = integrate_cartesian(m, cartesian_initial(m, 0.0, x0), 0.0, t1, s);
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_NEAR(std::hypot(car.x[i][0], car.x[i][1]), rad.x[i][0], 1e-6);
}

TEST(Dynamics, QuadratureReconstructsAngleAndHeight) {
  const auto m = perturbed(0.05);
  const double t1 = 5.0;
  const std::size_t n = 4000;
  const auto s = uniform_samples(0.0, t1, n);
  const auto rad = integrate_radial(m, {1.05, 0.0}, 0.0, t1, s, {1e-12, 1e-14});
  const auto cyl = integrate_cylindrical(m, {1.05, 0.0, 0.0, 0.0}, 0.0, t1, s, {1e-12, 1e-14});
  // Composite Simpson on the sampled r(t).
  double theta = 0.0, z = 0.0;
  const double h = t1 / n;
  for (std::size_t i = 0; i + 2 <= n; i += 2) {
    auto th = [&](std::size_t j) { return m.L / (rad.x[j][0] * rad.x[j][0]); };
    auto zz = [&](std::size_t j) { return axial_velocity(m, s[j], rad.x[j][0]); };
    theta += h / 3 * (th(i) + 4 * th(i + 1) + th(i + 2));
    z += h / 3 * (zz(i) + 4 * zz(i + 1) + zz(i + 2));
  }
  EXPECT_NEAR(theta, cyl.x.back()[2], 1e-7);
  EXPECT_NEAR(z, cyl.x.back()[3], 1e-7);
}

TEST(Dynamics, TimeReversalOfUnperturbedFlow) {
  const auto m = unperturbed(1.0, 1.0);
  const radial_state x0{1.2, -0.1};
  const double t1 = 5.0;
  const std::vector<double> fwd{t1};
  const auto a = integrate_radial(m, x0, 0.0, t1, fwd, {1e-13, 1e-14});
  const std::vector<double> back{0.0};
  const auto b = integrate_radial(m, {a.x[0][0], a.x[0][1]}, t1, 0.0, back, {1e-13, 1e-14});
  EXPECT_NEAR(b.x[0][0], x0.r, 1e-9);
  EXPECT_NEAR(b.x[0][1], x0.rdot, 1e-9);
}

TEST(Dynamics, CollisionIsReportedWithTime) {
  const auto m = unperturbed(0.0, 0.0);
  const std::vector<double> s{5.0};
  try {
    (void)integrate_radial(m, {1.0, -30.0}, 0.0, 5.0, s);
    FAIL() << "expected a collision";
  } catch (const collision& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 0.2);
  }
}

TEST(Dynamics, StartOnAxisIsRejected) {
  const auto m = unperturbed(1.0, 1.0);
  const std::vector<double> s{1.0};
  EXPECT_THROW(integrate_radial(m, {0.0, 0.0}, 0.0, 1.0, s), wire_singularity);
  EXPECT_THROW(cartesian_initial(m, 0.0, {0.0, 0.0}), wire_singularity);
}

TEST(Dynamics, FirstIntegralsConservedWithoutPerturbation) {
  const auto m = unperturbed(1.0, 1.0);
  const auto s = uniform_samples(0.0, 20.0, 200);
  const auto tr = integrate_cartesian(m, cartesian_initial(m, 0.0, {1.1, 0.05}), 0.0, 20.0, s);
  const auto fi = first_integrals(tr, m);
  for (const auto& x : fi) {
    EXPECT_NEAR(x.L, fi.front().L, 1e-8);
    EXPECT_NEAR(x.p_z, fi.front().p_z, 1e-8);
    EXPECT_NEAR(x.E0, fi.front().E0, 1e-8);
  }
  EXPECT_NEAR(fi.front().L, 1.0, 1e-15);
  EXPECT_NEAR(fi.front().p_z, 1.0, 1e-15);
}
