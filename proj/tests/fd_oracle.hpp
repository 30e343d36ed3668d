#pragma once

// Central-difference Taylor coefficients of the radial force, independent of the jet code.

#include <array>

#include "wirefield/dynamics.hpp"

namespace fd_oracle {

struct taylor {
  double A = 0.0, B = 0.0, C = 0.0;
};

/// A = -F', B = -F''/2, C = -F'''/6 from nine-point stencils (orders 8, 8, 6) with step h.
inline taylor coefficients(const wirefield::radial_model& m, double t, double r, double h = 2e-3) {
  static constexpr std::array<double, 9> d1 = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                                               4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
  static constexpr std::array<double, 9> d2 = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                               8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
  static constexpr std::array<double, 9> d3 = {-7.0 / 240,  3.0 / 10,   -169.0 / 120, 61.0 / 30, 0.0,
                                               -61.0 / 30, 169.0 / 120, -3.0 / 10,    7.0 / 240};
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double F = wirefield::radial_rhs(m, t, r + (i - 4) * h);
    f1 += d1[i] * F;
    f2 += d2[i] * F;
    f3 += d3[i] * F;
  }
  return {-f1 / h, -f2 / (2 * h * h), -f3 / (6 * h * h * h)};
}

}  // namespace fd_oracle
