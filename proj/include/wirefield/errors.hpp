#pragma once

#include <stdexcept>
#include <string>

namespace wirefield {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition (exit status 2 in the CLI).
class validation_error : public error {
 public:
  using error::error;
};

/// A numerical procedure could not deliver its result (exit status 3 in the CLI).
class numerical_error : public error {
 public:
  using error::error;
};

class invalid_profile : public validation_error {
 public:
  using validation_error::validation_error;
};

class unsupported_order : public validation_error {
 public:
  using validation_error::validation_error;
};

/// Evaluation requested at r <= 0, on or inside the wire.
class wire_singularity : public validation_error {
 public:
  explicit wire_singularity(double r)
      : validation_error("evaluation at r = " + std::to_string(r) + " is on the wire (r must be > 0)"), r_(r) {}
  double radius() const noexcept { return r_; }

 private:
  double r_;
};

class invalid_triplet : public validation_error {
 public:
  using validation_error::validation_error;
};

/// Quadrature ran out of its evaluation budget before reaching the tolerance.
class quadrature_budget : public numerical_error {
 public:
  quadrature_budget(double best_estimate, double error_estimate)
      : numerical_error("quadrature budget exhausted (estimate " + std::to_string(best_estimate) + ", error " +
                        std::to_string(error_estimate) + ")"),
        best_(best_estimate),
        err_(error_estimate) {}
  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return err_; }

 private:
  double best_, err_;
};

/// The trajectory reached the collision radius.
class collision : public numerical_error {
 public:
  explicit collision(double t)
      : numerical_error("collision with the wire at t = " + std::to_string(t)), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class step_underflow : public numerical_error {
 public:
  explicit step_underflow(double t)
      : numerical_error("step size underflow at t = " + std::to_string(t)), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Newton Jacobian M - I is numerically singular: the orbit is resonant.
class singular_jacobian : public numerical_error {
 public:
  explicit singular_jacobian(double sigma_min)
      : numerical_error("shooting Jacobian is singular (smallest singular value " + std::to_string(sigma_min) + ")"),
        sigma_(sigma_min) {}
  double smallest_singular_value() const noexcept { return sigma_; }

 private:
  double sigma_;
};

class divergence : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

class no_branch : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Iterates left the sampling annulus around the fixed point.
class escaped : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

}  // namespace wirefield
