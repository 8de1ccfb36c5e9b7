#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "nodalkit/covariance.hpp"
#include "nodalkit/errors.hpp"
#include "nodalkit/oracles.hpp"
#include "nodalkit/special_functions.hpp"

using namespace nodalkit;
constexpr double kPi = std::numbers::pi;

namespace {

// Plain power series for J0, used as a reference independent of the library.
double j0_power_series(double x) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = -0.25L * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST(LegendreTriple, ValuesAtOne) {
  for (int l = 0; l <= 2000; l += 7) {
    const auto t = legendre_triple(l, 1.0);
    EXPECT_EQ(t.p, 1.0);
    const double expected = 0.5 * l * (l + 1.0);
    EXPECT_NEAR(t.dp, expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(LegendreTriple, SmallDegreeExamples) {
  const auto five = legendre_triple(5, 1.0);
  EXPECT_EQ(five.p, 1.0);
  EXPECT_DOUBLE_EQ(five.dp, 15.0);
  // P5'' (1) = (l-1) l (l+1) (l+2) / 8
  EXPECT_NEAR(five.ddp, 4.0 * 5 * 6 * 7 / 8.0, 1e-12);

  const auto zero = legendre_triple(0, 0.3);
  EXPECT_EQ(zero.p, 1.0);
  EXPECT_EQ(zero.dp, 0.0);
  EXPECT_EQ(zero.ddp, 0.0);

  const double x = 0.5;
  const double p4 = (35 * std::pow(x, 4) - 30 * x * x + 3) / 8;
  EXPECT_NEAR(legendre_triple(4, 0.5).p, p4, 1e-15);
  EXPECT_NEAR(legendre_triple(4, 0.5).p, -0.2890625, 1e-15);
  EXPECT_NEAR(legendre_triple(4, 0.5).p, legendre_series_oracle(4, 0.5), 1e-15);
}

TEST(LegendreTriple, RejectsOutOfRange) {
  EXPECT_THROW(legendre_triple(3, 1.0000001), DomainError);
  EXPECT_THROW(legendre_triple(3, -1.5), DomainError);
  EXPECT_THROW(legendre_triple(-1, 0.0), DomainError);
}

TEST(LegendreTriple, BoundedOnInterval) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_int_distribution<int> ul(0, 2000);
  for (int i = 0; i < 2000; ++i) {
    const double v = legendre_triple(ul(rng), ux(rng)).p;
    EXPECT_LE(std::fabs(v), 1.0 + 1e-14);
  }
}

TEST(LegendreTriple, MatchesBinomialSumOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_int_distribution<int> ul(0, 500);
  for (int i = 0; i < 200; ++i) {
    const int l = ul(rng);
    const double x = ux(rng);
    const double oracle = legendre_series_oracle_wide(l, x);
    const double value = legendre_triple(l, x).p;
    EXPECT_LE(std::fabs(value - oracle), 1e-9 * std::fabs(oracle)) << "l=" << l << " x=" << x;
  }
}

TEST(LegendreTriple, DerivativesMatchCenteredDifferences) {
  const double h = 1e-6;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(-0.9, 0.9);
  for (int l : {2, 7, 30, 120}) {
    for (int i = 0; i < 20; ++i) {
      const double x = ux(rng);
      const auto t = legendre_triple(l, x);
      const double fd1 = (legendre_triple(l, x + h).p - legendre_triple(l, x - h).p) / (2 * h);
      const double fd2 = (legendre_triple(l, x + h).dp - legendre_triple(l, x - h).dp) / (2 * h);
      const double scale1 = std::max(std::fabs(t.dp), 1e-3 * l * l);
      const double scale2 = std::max(std::fabs(t.ddp), 1e-3 * std::pow(l, 4));
      EXPECT_LE(std::fabs(fd1 - t.dp), 1e-4 * scale1) << l << " " << x;
      EXPECT_LE(std::fabs(fd2 - t.ddp), 1e-4 * scale2) << l << " " << x;
    }
  }
}

TEST(AssociatedLegendre, LowDegreeExamples) {
  const auto row0 = associated_legendre_row(0, 1.1);
  ASSERT_EQ(row0.size(), 1u);
  EXPECT_NEAR(row0[0], 1.0 / std::sqrt(4 * kPi), 1e-15);

  const auto row1 = associated_legendre_row(1, 0.0);
  ASSERT_EQ(row1.size(), 2u);
  EXPECT_NEAR(row1[0], std::sqrt(3.0 / (4 * kPi)), 1e-15);
  EXPECT_EQ(row1[1], 0.0);
}

double closure_sum(int l, double theta) {
  const auto row = associated_legendre_row(l, theta);
  double s = row[0] * row[0];
  for (int m = 1; m <= l; ++m) s += 2 * row[m] * row[m];
  return 4 * kPi / (2 * l + 1) * s;
}

TEST(AssociatedLegendre, UnitClosureAtCoincidentPoints) {
  EXPECT_NEAR(closure_sum(3, kPi / 3), 1.0, 1e-14);
  for (int l : {40, 200, 1500}) {
    for (double theta : {1e-3, 0.4, kPi / 2, 2.9}) EXPECT_NEAR(closure_sum(l, theta), 1.0, 1e-10);
  }
}

TEST(AssociatedLegendre, AdditionTheorem) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ut(0.0, kPi), up(0.0, 2 * kPi);
  std::uniform_int_distribution<int> ul(0, 50);
  for (int i = 0; i < 200; ++i) {
    const int l = ul(rng);
    const SpherePoint x{ut(rng), up(rng)}, y{ut(rng), up(rng)};
    const auto rx = associated_legendre_row(l, x.theta);
    const auto ry = associated_legendre_row(l, y.theta);
    double s = rx[0] * ry[0];
    for (int m = 1; m <= l; ++m) s += 2 * rx[m] * ry[m] * std::cos(m * (x.phi - y.phi));
    const double lhs = 4 * kPi / (2 * l + 1) * s;
    EXPECT_NEAR(lhs, legendre_series_oracle(l, cos_distance(x, y)), 1e-10) << "l=" << l;
  }
}

TEST(AssociatedLegendre, ThetaDerivativeMatchesFiniteDifference) {
  const double h = 1e-6;
  for (int l : {1, 4, 25, 300}) {
    for (double theta : {0.3, 1.0, kPi / 2, 2.5}) {
      const auto d = associated_legendre_theta_derivative_row(l, theta);
      const auto up = associated_legendre_row(l, theta + h);
      const auto dn = associated_legendre_row(l, theta - h);
      for (int m = 0; m <= l; ++m) {
        const double fd = (up[m] - dn[m]) / (2 * h);
        EXPECT_NEAR(d[m], fd, 1e-6 * (1.0 + l)) << "l=" << l << " m=" << m;
      }
    }
  }
}

TEST(AssociatedLegendre, RowsFromCosineAgreeWithAngleForm) {
  std::vector<double> a, b, da, db;
  associated_legendre_rows(60, 0.8, a, &da);
  associated_legendre_rows_cs(60, std::cos(0.8), std::sin(0.8), b, &db);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t m = 0; m < a.size(); ++m) {
    EXPECT_NEAR(a[m], b[m], 1e-14);
    EXPECT_NEAR(da[m], db[m], 1e-12);
  }
}

TEST(BesselJ0, Examples) {
  EXPECT_EQ(bessel_j0(0.0), 1.0);

  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (j0_power_series(mid) > 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 2.404825557695773, 1e-12);
  EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-9);
}

TEST(BesselJ0, LargeArgumentTruncatedAsymptotic) {
  // Two-series Hankel form with a handful of terms; remainder is below the
  // first omitted term, which at x = 50 is far below 1e-10.
  const double x = 50.0;
  auto g = [](int k) {
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v *= (2.0 * j - 1) * (2.0 * j - 1) / (8.0 * j);
    return v;
  };
  double p = 0, q = 0;
  for (int k = 0; k < 6; ++k) {
    const double even = g(2 * k) / std::pow(x, 2 * k) * (k % 2 ? -1 : 1);
    const double odd = g(2 * k + 1) / std::pow(x, 2 * k + 1) * (k % 2 ? -1 : 1);
    p += even;
    q += odd;
  }
  const double chi = x - kPi / 4;
  const double reference = std::sqrt(2 / (kPi * x)) * (p * std::cos(chi) + q * std::sin(chi));
  const double remainder = g(12) / std::pow(x, 12);
  EXPECT_NEAR(bessel_j0(x), reference, remainder + 1e-14);
}

TEST(BesselJ0, AgreesWithBoostAcrossCrossover) {
  for (double x = 0.0; x <= 100.0; x += 0.0137) {
    EXPECT_NEAR(bessel_j0(x), boost::math::cyl_bessel_j(0, x), 1e-12) << x;
  }
  EXPECT_NEAR(bessel_j0(std::nextafter(12.0, 0.0)), bessel_j0(12.0), 1e-12);
}

TEST(BesselJ0, DerivativesMatchBoost) {
  for (double x : {0.0, 0.05, 1.0, 7.5, 11.99, 12.01, 30.0, 200.0}) {
    const auto d = bessel_j0_derivatives(x);
    const double j1 = boost::math::cyl_bessel_j(1, x);
    const double j2 = boost::math::cyl_bessel_j(2, x);
    EXPECT_NEAR(d.j0, boost::math::cyl_bessel_j(0, x), 1e-12);
    EXPECT_NEAR(d.d1, -j1, 2e-12);
    // J0'' = (J2 - J0) / 2
    EXPECT_NEAR(d.d2, 0.5 * (j2 - boost::math::cyl_bessel_j(0, x)), 5e-12) << x;
  }
}

TEST(EllipticE, Examples) {
  EXPECT_NEAR(elliptic_e(0.0), kPi / 2, 1e-15);
  EXPECT_NEAR(elliptic_e(1.0), 1.0, 1e-15);
  const double m = 0.5;
  const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [m](double t) { return std::sqrt(1 - m * std::sin(t) * std::sin(t)); }, 0.0, kPi / 2, 15,
      1e-14);
  EXPECT_NEAR(elliptic_e(0.5), quad, 1e-10);
}

TEST(EllipticE, RelativeAccuracyAgainstBoost) {
  for (double m = 0.0; m <= 1.0; m += 1.0 / 512) {
    const double ref = boost::math::ellint_2(std::sqrt(m));
    EXPECT_NEAR(elliptic_e(m), ref, 1e-12 * ref) << m;
  }
  EXPECT_NEAR(elliptic_e(1 - 1e-14), 1.0, 1e-12);
}

TEST(EllipticE, RejectsOutOfRange) {
  EXPECT_THROW(elliptic_e(-0.01), DomainError);
  EXPECT_THROW(elliptic_e(1.01), DomainError);
}

TEST(GaussianNormExpectation, Examples) {
  for (double s2 : {0.25, 1.0, 9.0}) {
    EXPECT_NEAR(gaussian_norm_expectation(s2, s2), std::sqrt(s2) * std::sqrt(kPi / 2), 1e-14);
  }
  EXPECT_NEAR(gaussian_norm_expectation(1.0, 0.0), std::sqrt(2 / kPi), 1e-15);
  EXPECT_NEAR(gaussian_norm_expectation(2.0, 0.5), quadrature_norm_oracle(2.0, 0.5), 1e-9);
  EXPECT_THROW(gaussian_norm_expectation(0.0, 0.0), DegenerateVarianceError);
  EXPECT_THROW(gaussian_norm_expectation(-1.0, 1.0), DomainError);
}

TEST(GaussianNormExpectation, SymmetricAndHomogeneous) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0), ut(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng), t = ut(rng);
    const double v = gaussian_norm_expectation(a, b);
    EXPECT_NEAR(v, gaussian_norm_expectation(b, a), 1e-15 * v);
    EXPECT_NEAR(gaussian_norm_expectation(t * a, t * b), std::sqrt(t) * v, 1e-13 * std::sqrt(t) * v);
  }
}
