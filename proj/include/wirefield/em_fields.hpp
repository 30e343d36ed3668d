#pragma once

// E and B of the wire with mu0 = 2 pi and Phi = 0:
//   E = -dA/dt = k d_t a  z,     B = curl A = (I0 / r + k d_r a)  theta.

#include <array>
#include <cmath>

#include "wirefield/potential_source.hpp"

namespace wirefield {

struct cylindrical_vector {
  double r = 0.0, theta = 0.0, z = 0.0;
};

struct field_sample {
  double t = 0.0;
  cylindrical_vector position;  // (r, theta, z)
  cylindrical_vector E;
  cylindrical_vector B;
};

inline field_sample field_eval(const potential_source& src, double t, double r, double theta = 0.0, double z = 0.0) {
  detail::check_radius(r);
  const auto& P = src.profile();
  field_sample s;
  s.t = t;
  s.position = {r, theta, z};
  s.B.theta = P.I0() / r;
  if (P.k() != 0.0 && !P.identically_zero()) {
    s.E.z = P.k() * src.partials(t, r, 1, 0).d[0];
    s.B.theta += P.k() * src.partials(t, r, 0, 1).d[1];
  }
  return s;
}

inline field_sample field_eval(const potential_field& field, double t, double r, double theta = 0.0, double z = 0.0) {
  return field_eval(exact_potential(field), t, r, theta, z);
}

/// Divergence of A = A_z(t, r) z; A_z does not depend on z.
inline double gauge_divergence(const potential_field&, double, double r) {
  detail::check_radius(r);
  return 0.0;
}

using cartesian_vector = std::array<double, 3>;

struct cartesian_fields {
  cartesian_vector E{};
  cartesian_vector B{};
};

/// Cartesian components at (x, y, z); theta-hat = (-y / r, x / r, 0).
inline cartesian_fields cartesian(const field_sample& s) {
  const double c = std::cos(s.position.theta), sn = std::sin(s.position.theta);
  cartesian_fields f;
  f.E = {s.E.r * c - s.E.theta * sn, s.E.r * sn + s.E.theta * c, s.E.z};
  f.B = {s.B.r * c - s.B.theta * sn, s.B.r * sn + s.B.theta * c, s.B.z};
  return f;
}

}  // namespace wirefield
