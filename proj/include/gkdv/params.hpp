#pragma once

namespace gkdv {

// |a*d - 1| at or below this value selects the resonant regime.
inline constexpr double kResonanceEps = 1e-12;

/// Coefficients (a, c, d, r) of the linearized coupled KdV system
///
///   u_t + u_xxx + a v_xxx = 0,
///   c v_t + r v_x + v_xxx + d u_xxx = 0
///
/// on the circle. All four must be strictly positive.
class PhysicalParams {
 public:
  PhysicalParams(double a, double c, double d, double r);

  double a() const noexcept { return a_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }
  double r() const noexcept { return r_; }

  /// Weight a*c/d multiplying |v|^2 in the energy norm.
  double weight() const noexcept { return a_ * c_ / d_; }

  /// True on the surface a*d = 1, where one branch grows only linearly in k.
  bool resonant() const noexcept;

  /// (a, c, d, r) = (2, 1, 1, 1).
  static PhysicalParams generic();
  /// (a, c, d, r) = (1, 1, 1, 1).
  static PhysicalParams resonant_preset();

 private:
  double a_;
  double c_;
  double d_;
  double r_;
};

}  // namespace gkdv
