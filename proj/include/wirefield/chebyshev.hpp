#pragma once

// Chebyshev series on [a, b] built from values at the Lobatto points x_k = cos(pi k / N).
// Lobatto grids nest under doubling, so refinement reuses every previous sample.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace wirefield {

class chebyshev_series {
 public:
  chebyshev_series() = default;
  chebyshev_series(double a, double b, std::vector<double> coeffs) : a_(a), b_(b), c_(std::move(coeffs)) {}

  /// Coefficients from samples f(node(k, N)), k = 0..N (discrete cosine transform, type I).
  static chebyshev_series from_lobatto(double a, double b, const std::vector<double>& values) {
    const std::size_t N = values.size() - 1;
    std::vector<double> c(N + 1, 0.0);
    for (std::size_t n = 0; n <= N; ++n) {
      double s = 0.0;
      for (std::size_t k = 0; k <= N; ++k) {
        const double w = (k == 0 || k == N) ? 0.5 : 1.0;
        s += w * values[k] * std::cos(std::numbers::pi * static_cast<double>(n * k % (2 * N)) / static_cast<double>(N));
      }
      c[n] = 2.0 * s / static_cast<double>(N);
    }
    c[0] *= 0.5;
    c[N] *= 0.5;
    return {a, b, std::move(c)};
  }

  /// k-th Lobatto point of an N-interval grid, mapped to [a, b].
  static double node(double a, double b, std::size_t k, std::size_t N) {
    const double x = std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(N));
    return 0.5 * (a + b) + 0.5 * (b - a) * x;
  }

  double operator()(double r) const {
    const double x = (2.0 * r - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t n = c_.size(); n-- > 1;) {
      const double t = 2.0 * x * b1 - b2 + c_[n];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + c_[0];
  }

  /// Size of the trailing coefficients, a proxy for the truncation error.
  double tail(std::size_t count = 4) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count && i < c_.size(); ++i) s += std::abs(c_[c_.size() - 1 - i]);
    return s;
  }

  double lower() const { return a_; }
  double upper() const { return b_; }
  const std::vector<double>& coefficients() const { return c_; }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> c_{0.0};
};

}  // namespace wirefield
