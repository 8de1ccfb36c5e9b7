#include "nodalkit/covariance.hpp"

#include <cmath>
#include <numbers>

#include "nodalkit/errors.hpp"
#include "nodalkit/special_functions.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinVariance = 1e-14;

void check_degree(int degree) {
  if (degree < 1) throw DomainError("degree must be at least 1");
}

double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

void check_blocks_theta(int degree, double theta) {
  if (!(theta >= 0.0 && theta <= 0.5 * kPi)) {
    throw DomainError("colatitude outside the hemisphere");
  }
  if (theta == 0.5 * kPi) {
    throw DegenerateVarianceError("field variance vanishes on the equator");
  }
  if (theta == 0.0 && degree % 2 == 0) {
    throw DegenerateVarianceError("field variance vanishes at the pole for even degree");
  }
}

}  // namespace

HemispherePoint::HemispherePoint(double theta, double phi) : theta_(theta), phi_(phi) {
  if (!(theta >= 0.0 && theta <= 0.5 * kPi)) {
    throw DomainError("HemispherePoint: colatitude outside [0, pi/2]");
  }
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) {
    throw DomainError("HemispherePoint: longitude outside [0, 2 pi)");
  }
}

double HemispherePoint::equator_distance() const noexcept { return 0.5 * kPi - theta_; }

double HemispherePoint::psi(int degree) const noexcept {
  return degree * (kPi - 2.0 * theta_);
}

SpherePoint mirror(const SpherePoint& point) noexcept { return {kPi - point.theta, point.phi}; }

double cos_distance(const SpherePoint& x, const SpherePoint& y) noexcept {
  return clamp_unit(std::cos(x.theta) * std::cos(y.theta) +
                    std::sin(x.theta) * std::sin(y.theta) * std::cos(x.phi - y.phi));
}

double covariance(int degree, const SpherePoint& x, const SpherePoint& y) {
  check_degree(degree);
  const double direct = legendre_triple(degree, cos_distance(x, y)).p;
  const double mirrored = legendre_triple(degree, cos_distance(x, mirror(y))).p;
  return direct - mirrored;
}

CovarianceBlocks covariance_blocks(int degree, double theta) {
  check_degree(degree);
  check_blocks_theta(degree, theta);
  // Everything is a function of the angle between x and its mirror image,
  // u = pi - 2 theta; cos u = -cos 2 theta, sin u = sin 2 theta.
  const double u = kPi - 2.0 * theta;
  const double cu = std::cos(u);
  const double su = std::sin(u);
  const LegendreTriple lt = legendre_triple(degree, clamp_unit(cu));
  const double dp1 = 0.5 * degree * (degree + 1.0);

  CovarianceBlocks out;
  out.a = 1.0 - lt.p;
  out.b = {-su * lt.dp, 0.0};
  out.c[0][0] = dp1 + cu * lt.dp - su * su * lt.ddp;
  out.c[1][1] = dp1 - lt.dp;
  out.c[0][1] = out.c[1][0] = 0.0;
  return out;
}

ConditionalCovariance conditional_covariance(int degree, double theta) {
  const CovarianceBlocks blocks = covariance_blocks(degree, theta);
  if (!(blocks.a > kMinVariance)) {
    throw DegenerateVarianceError("field variance below 1e-14; point lies in the excised band");
  }
  ConditionalCovariance out;
  out.variance = blocks.a;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.omega[i][j] = blocks.c[i][j] - blocks.b[i] * blocks.b[j] / blocks.a;
    }
  }

  // Closed-form entries in terms of 2 theta.
  const double lam = degree * (degree + 1.0);
  const double c2 = std::cos(2.0 * theta);
  const double s2 = std::sin(2.0 * theta);
  const LegendreTriple lt = legendre_triple(degree, clamp_unit(-c2));
  out.s11 = -(2.0 / lam) * (c2 * lt.dp + s2 * s2 * lt.ddp + s2 * s2 * lt.dp * lt.dp / (1.0 - lt.p));
  out.s22 = -(2.0 / lam) * lt.dp;
  return out;
}

}  // namespace nodalkit
