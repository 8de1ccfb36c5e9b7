#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nodalkit/covariance.hpp"
#include "nodalkit/errors.hpp"
#include "nodalkit/oracles.hpp"
#include "nodalkit/sampler.hpp"

using namespace nodalkit;
constexpr double kPi = std::numbers::pi;

namespace {

struct Moments {
  double mean, variance, se_of_variance;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0, m4 = 0;
  for (double x : v) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return {mean, m2 * n / (n - 1), std::sqrt((m4 - m2 * m2) / n)};
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST(SampleCoefficients, ParitySelection) {
  const auto one = sample_coefficients(1, EnsembleMode::boundary_adapted, 42);
  EXPECT_EQ(one.real_degrees_of_freedom(), 1);
  EXPECT_TRUE(one.active(0));
  EXPECT_FALSE(one.active(1));
  EXPECT_EQ(one.coefficient(1), std::complex<double>(0.0, 0.0));
  EXPECT_EQ(one.coefficient(0).imag(), 0.0);

  const auto four = sample_coefficients(4, EnsembleMode::boundary_adapted, 42);
  EXPECT_EQ(four.real_degrees_of_freedom(), 4);
  for (int m = -4; m <= 4; ++m) EXPECT_EQ(four.active(m), m == 1 || m == -1 || m == 3 || m == -3) << m;

  for (int l = 1; l <= 40; ++l) {
    EXPECT_EQ(sample_coefficients(l, EnsembleMode::boundary_adapted, 1).real_degrees_of_freedom(), l);
    EXPECT_EQ(sample_coefficients(l, EnsembleMode::full_sphere, 1).real_degrees_of_freedom(), 2 * l + 1);
  }
}

TEST(SampleCoefficients, DeterministicAndReal) {
  const auto a = sample_coefficients(25, EnsembleMode::full_sphere, 9, 3);
  const auto b = sample_coefficients(25, EnsembleMode::full_sphere, 9, 3);
  const auto c = sample_coefficients(25, EnsembleMode::full_sphere, 9, 4);
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_NE(a.entries, c.entries);
  EXPECT_EQ(a.coefficient(0).imag(), 0.0);
  for (int m = 1; m <= 25; ++m) EXPECT_EQ(a.coefficient(-m), std::conj(a.coefficient(m)));
  EXPECT_NEAR(a.normalization(), std::sqrt(4 * kPi / 51), 1e-15);
  EXPECT_NEAR(sample_coefficients(25, EnsembleMode::boundary_adapted, 9).normalization(),
              std::sqrt(8 * kPi / 51), 1e-15);
  EXPECT_THROW(sample_coefficients(0, EnsembleMode::full_sphere, 1), DomainError);
}

TEST(SampleCoefficients, ModeNames) {
  EXPECT_STREQ(mode_name(EnsembleMode::boundary_adapted), "boundary");
  EXPECT_EQ(parse_mode("full"), EnsembleMode::full_sphere);
  EXPECT_EQ(parse_mode("boundary"), EnsembleMode::boundary_adapted);
  EXPECT_THROW(parse_mode("north"), DomainError);
}

TEST(Synthesis, RealAndDirichlet) {
  for (int l : {1, 2, 9, 30}) {
    const auto cs = sample_coefficients(l, EnsembleMode::boundary_adapted, 5);
    const auto field = synthesize_field(cs, default_grid(EnsembleMode::boundary_adapted, 10 * l + 1, 20 * l));
    EXPECT_LE(field.max_abs_on_row(field.grid.n_theta - 1), 1e-10);
    for (double th : {0.1, 0.7, 1.5}) {
      EXPECT_LE(std::fabs(evaluate_field_complex(cs, th, 2.0).imag()), 1e-10);
    }
  }
}

TEST(Synthesis, GridMatchesDirectSummation) {
  for (auto mode : {EnsembleMode::boundary_adapted, EnsembleMode::full_sphere}) {
    const int l = 17;
    const auto cs = sample_coefficients(l, mode, 123);
    const auto grid = default_grid(mode, 61, 90);
    const auto field = synthesize_field(cs, grid);
    for (int i = 0; i < grid.n_theta; i += 7) {
      for (int j = 0; j < grid.n_phi; j += 11) {
        const double direct = evaluate_field_complex(cs, grid.theta(i), grid.phi(j)).real();
        EXPECT_NEAR(field.at(i, j), direct, 1e-9);
      }
    }
  }
}

TEST(Synthesis, NormalDerivativeOnEquator) {
  const int l = 12;
  const auto cs = sample_coefficients(l, EnsembleMode::boundary_adapted, 4);
  const auto grid = default_grid(EnsembleMode::boundary_adapted, 41, 60);
  const auto field = synthesize_field(cs, grid);
  ASSERT_EQ(field.normal_derivative.size(), static_cast<std::size_t>(grid.n_phi));
  const double h = 1e-6;
  for (int j = 0; j < grid.n_phi; j += 13) {
    const double phi = grid.phi(j);
    const double fd = -(evaluate_field(cs, kPi / 2 + h, phi) - evaluate_field(cs, kPi / 2 - h, phi)) / (2 * h);
    EXPECT_NEAR(field.normal_derivative[j], fd, 1e-6 * l);
  }
}

TEST(Synthesis, RotateAzimuthShiftsField) {
  const auto cs = sample_coefficients(8, EnsembleMode::full_sphere, 17);
  const double shift = 0.37;
  const auto rot = rotate_azimuth(cs, shift);
  for (double th : {0.3, 1.2, 2.8}) {
    for (double phi : {0.0, 1.0, 5.0}) {
      EXPECT_NEAR(evaluate_field(rot, th, phi + shift), evaluate_field(cs, th, phi), 1e-12);
    }
  }
}

TEST(Synthesis, VarianceMatchesCovariance) {
  const int l = 10;
  const SpherePoint x{kPi / 4, 0.8};
  const auto values = sample_point_values(l, EnsembleMode::boundary_adapted, x, 2000, 31);
  const auto m = moments(values);
  const double target = 1 - legendre_series_oracle(10, 0.0);
  EXPECT_NEAR(target, 1 + 63.0 / 256, 1e-15);
  EXPECT_NEAR(m.variance, target, 5 * m.se_of_variance);

  for (const SpherePoint& p : {SpherePoint{0.4, 0.1}, SpherePoint{2.2, 4.0}}) {
    const auto full = moments(sample_point_values(l, EnsembleMode::full_sphere, p, 2000, 32));
    EXPECT_NEAR(full.variance, 1.0, 5 * full.se_of_variance);
  }
}

TEST(Synthesis, GridVarianceAgreesWithPointSampler) {
  // same estimand through the grid synthesizer
  const int l = 10, reps = 2000;
  const auto grid = default_grid(EnsembleMode::boundary_adapted, 101, 200);
  GridSynthesizer synth(l, EnsembleMode::boundary_adapted, grid);
  std::vector<double> v;
  for (int r = 0; r < reps; ++r) {
    auto cs = std::make_shared<const CoefficientSet>(sample_coefficients(l, EnsembleMode::boundary_adapted, 99, r));
    v.push_back(synth.synthesize(cs).at(50, 0));
  }
  const auto m = moments(v);
  EXPECT_NEAR(m.variance, 1 + 63.0 / 256, 5 * m.se_of_variance);
}

TEST(EmpiricalCovariance, DirichletDiagonalAndMirror) {
  const int l = 10;
  const SpherePoint x{0.6, 1.0};
  const std::vector<std::pair<SpherePoint, SpherePoint>> pairs{
      {x, {kPi / 2, 2.0}}, {x, x}, {x, mirror(x)}, {x, {1.1, 3.0}}, {mirror(x), {1.1, 3.0}}};
  const auto est = empirical_covariance(l, EnsembleMode::boundary_adapted, pairs, 2000, 7);
  EXPECT_NEAR(est[0].mean, 0.0, 5 * est[0].standard_error + 1e-12);
  EXPECT_NEAR(est[1].mean, covariance(l, x, x), 5 * est[1].standard_error);
  const double cd = cos_distance(x, mirror(x));
  EXPECT_NEAR(est[2].exact, legendre_series_oracle(l, cd) - 1.0, 1e-12);
  EXPECT_NEAR(est[2].mean, est[2].exact, 5 * est[2].standard_error);
  // mirror antisymmetry
  EXPECT_NEAR(est[3].mean, -est[4].mean, 5 * std::hypot(est[3].standard_error, est[4].standard_error));
  EXPECT_NEAR(est[3].mean, est[3].exact, 5 * est[3].standard_error);
  EXPECT_THROW(empirical_covariance(l, EnsembleMode::boundary_adapted, pairs, 99, 7), DomainError);
}

TEST(EmpiricalCovariance, FullSphereIsotropy) {
  const int l = 6;
  const double d = 0.9;
  std::vector<std::pair<SpherePoint, SpherePoint>> pairs;
  for (int k = 0; k < 10; ++k) {
    const double theta = 0.2 + 0.2 * k, phi = 0.6 * k;
    // second point at distance d along the meridian
    pairs.push_back({{theta, phi}, {theta + d, phi}});
  }
  const auto est = empirical_covariance(l, EnsembleMode::full_sphere, pairs, 2000, 8);
  const double target = legendre_series_oracle(l, std::cos(d));
  for (const auto& e : est) {
    EXPECT_NEAR(e.exact, target, 1e-12);
    EXPECT_NEAR(e.mean, target, 5 * e.standard_error);
  }
}

TEST(Sampler, AzimuthalShiftInvarianceInLaw) {
  const int l = 10;
  const double theta = kPi / 3;
  const int n = 2000;
  const auto a = sample_point_values(l, EnsembleMode::boundary_adapted, {theta, 0.4}, n, 1001);
  const auto b = sample_point_values(l, EnsembleMode::boundary_adapted, {theta, 0.4 + 2.1}, n, 2002);
  const double critical = 1.628 * std::sqrt(2.0 / n);  // 1% level
  EXPECT_LT(ks_statistic(a, b), critical);
}

TEST(FieldDump, RoundTrip) {
  const auto cs = sample_coefficients(6, EnsembleMode::boundary_adapted, 3, 2);
  const auto field = synthesize_field(cs, default_grid(EnsembleMode::boundary_adapted, 61, 120));
  std::stringstream buf;
  write_field_binary(buf, field);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "NKFS");
  std::istringstream in(bytes);
  const auto back = read_field_binary(in);
  EXPECT_EQ(back.degree, 6);
  EXPECT_EQ(back.mode, EnsembleMode::boundary_adapted);
  EXPECT_EQ(back.seed, 3u);
  EXPECT_EQ(back.replicate, 2u);
  EXPECT_EQ(back.grid.n_theta, 61);
  EXPECT_EQ(back.grid.n_phi, 120);
  EXPECT_EQ(back.grid.theta_max, field.grid.theta_max);
  EXPECT_EQ(back.values, field.values);
  EXPECT_EQ(back.normal_derivative, field.normal_derivative);
  std::istringstream junk("XXXXjunk");
  EXPECT_THROW(read_field_binary(junk), std::runtime_error);
}
