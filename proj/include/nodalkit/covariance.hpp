#pragma once

#include <array>

namespace nodalkit {

// Point on the unit sphere: colatitude theta in [0, pi], longitude phi.
struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;
};

// Point on the closed northern hemisphere, theta in [0, pi/2], phi in [0, 2 pi).
class HemispherePoint {
 public:
  HemispherePoint(double theta, double phi);

  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }
  // Distance to the equator along a meridian.
  double equator_distance() const noexcept;
  // Scaled distance psi = l (pi - 2 theta).
  double psi(int degree) const noexcept;
  SpherePoint sphere() const noexcept { return {theta_, phi_}; }
  operator SpherePoint() const noexcept { return sphere(); }

 private:
  double theta_;
  double phi_;
};

// Reflection through the equatorial plane, (theta, phi) -> (pi - theta, phi).
SpherePoint mirror(const SpherePoint& point) noexcept;

// cos of the great-circle distance.
double cos_distance(const SpherePoint& x, const SpherePoint& y) noexcept;

// r_l(x, y) = P_l(cos d(x, y)) - P_l(cos d(x, mirror(y))).
double covariance(int degree, const SpherePoint& x, const SpherePoint& y);

// Covariance of (T, grad T) at a point of colatitude theta, gradient in the
// orthonormal frame (d/dtheta, (1/sin theta) d/dphi).
struct CovarianceBlocks {
  double a = 0.0;                       // Var T
  std::array<double, 2> b{};            // E[T grad T]
  std::array<std::array<double, 2>, 2> c{};  // E[grad T grad T^t]
};

// Requires 0 <= theta < pi/2; throws DegenerateVarianceError at the equator
// and at the pole for even degree.
CovarianceBlocks covariance_blocks(int degree, double theta);

// Covariance of grad T conditioned on T = 0, together with
// S = 2 Omega / (l (l+1)) - I from the closed-form entries.
struct ConditionalCovariance {
  std::array<std::array<double, 2>, 2> omega{};
  double s11 = 0.0;
  double s22 = 0.0;
  double variance = 0.0;
};

// Omega = C - B^t B / A. Throws DegenerateVarianceError when A <= 1e-14.
ConditionalCovariance conditional_covariance(int degree, double theta);

}  // namespace nodalkit
