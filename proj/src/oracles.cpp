#include "nodalkit/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "nodalkit/covariance.hpp"
#include "nodalkit/density.hpp"
#include "nodalkit/errors.hpp"
#include "nodalkit/kac_rice.hpp"
#include "nodalkit/nodal_geometry.hpp"
#include "nodalkit/special_functions.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;

template <class Real>
double binomial_sum_legendre(int degree, double x_in) {
  const Real x(x_in);
  const int l = degree;
  // Term k: (-1)^k C(l, k) C(2l - 2k, l) x^{l - 2k}. With r = l - 2k,
  // C(2l - 2k, l) = C(n, r) for n = 2l - 2k, and stepping k -> k + 1 maps
  // C(n, r) -> C(n, r) * r (r - 1) / (n (n - 1)).
  Real c_nr = 1;
  for (int i = 1; i <= l; ++i) c_nr = c_nr * (l + i) / i;  // C(2l, l)
  Real c_lk = 1;
  Real sum = 0;
  for (int k = 0; 2 * k <= l; ++k) {
    if (k > 0) {
      c_lk = c_lk * (l - k + 1) / k;
      const int n = 2 * l - 2 * (k - 1), r = l - 2 * (k - 1);
      c_nr = c_nr * r * (r - 1) / (Real(n) * (n - 1));
    }
    Real term = c_lk * c_nr * pow(x, l - 2 * k);
    if (k % 2 == 1) term = -term;
    sum += term;
  }
  return static_cast<double>(sum / pow(Real(2), degree));
}

}  // namespace

double legendre_series_oracle(int degree, double x) {
  if (degree < 0) throw DomainError("legendre_series_oracle: negative degree");
  if (degree > 60) throw DomainError("legendre_series_oracle: degree above 60");
  return binomial_sum_legendre<boost::multiprecision::cpp_bin_float_50>(degree, x);
}

double legendre_series_oracle_wide(int degree, double x) {
  if (degree < 0) throw DomainError("legendre_series_oracle_wide: negative degree");
  if (degree > 500) throw DomainError("legendre_series_oracle_wide: degree above 500");
  using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<400>>;
  return binomial_sum_legendre<Wide>(degree, x);
}

double quadrature_norm_oracle(double var1, double var2) {
  if (!(var1 >= 0.0 && var2 >= 0.0)) throw DomainError("quadrature_norm_oracle: negative variance");
  auto f = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return std::sqrt(var1 * c * c + var2 * s * s);
  };
  double err = 0.0;
  const double quarter =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 0.5 * kPi, 15, 1e-14,
                                                                     &err);
  return std::sqrt(0.5 * kPi) * 4.0 * quarter / (2.0 * kPi);
}

McEstimate mc_conditional_k1(double omega11, double omega22, double variance, long samples,
                             std::uint64_t seed) {
  if (!(variance > 0.0)) throw DegenerateVarianceError("mc_conditional_k1: zero variance");
  if (!(omega11 >= 0.0 && omega22 >= 0.0) || (omega11 == 0.0 && omega22 == 0.0)) {
    throw DegenerateVarianceError("mc_conditional_k1: degenerate gradient covariance");
  }
  if (samples < 2) throw DomainError("mc_conditional_k1: need at least 2 samples");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  const double s1 = std::sqrt(omega11), s2 = std::sqrt(omega22);
  double mean = 0.0, m2 = 0.0;
  for (long n = 1; n <= samples; ++n) {
    const double x = s1 * normal(engine);
    const double y = s2 * normal(engine);
    const double v = std::hypot(x, y);
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  const double scale = 1.0 / std::sqrt(2.0 * kPi * variance);
  McEstimate out;
  out.estimate = mean * scale;
  out.standard_error = std::sqrt(m2 / (samples - 1) / samples) * scale;
  return out;
}

McEstimate mc_conditional_k1(int degree, double psi, long samples, std::uint64_t seed) {
  const double theta = 0.5 * (kPi - psi / degree);
  const ConditionalCovariance cc = conditional_covariance(degree, theta);
  return mc_conditional_k1(std::max(cc.omega[0][0], 0.0), std::max(cc.omega[1][1], 0.0),
                           cc.variance, samples, seed);
}

OracleReport make_report(std::string quantity, double oracle, double value, double tolerance,
                         bool relative) {
  OracleReport r;
  r.quantity = std::move(quantity);
  r.oracle = oracle;
  r.value = value;
  r.abs_dev = std::abs(value - oracle);
  r.rel_dev = oracle != 0.0 ? r.abs_dev / std::abs(oracle) : r.abs_dev;
  r.tolerance = tolerance;
  r.relative = relative;
  r.pass = (relative ? r.rel_dev : r.abs_dev) <= tolerance;
  return r;
}

std::vector<OracleReport> run_oracle_suite(std::uint64_t seed) {
  std::vector<OracleReport> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  out.push_back(make_report("legendre P4(0.5)", -0.2890625, legendre_triple(4, 0.5).p, 1e-15,
                            false));
  for (int l : {2, 7, 20, 45, 60}) {
    const double x = 2.0 * unit(rng) - 1.0;
    out.push_back(make_report("legendre P" + std::to_string(l) + " vs binomial sum",
                              legendre_series_oracle(l, x), legendre_triple(l, x).p, 1e-12,
                              false));
  }
  out.push_back(make_report("legendre P'(1) l=5", 15.0, legendre_triple(5, 1.0).dp, 1e-12, true));

  for (double x : {0.5, 2.404825557695773, 7.3, 11.99, 12.0, 12.01, 30.0, 50.0, 250.0}) {
    out.push_back(make_report("bessel J0(" + std::to_string(x) + ")",
                              boost::math::cyl_bessel_j(0, x), bessel_j0(x), 1e-12, false));
  }

  for (double m : {0.0, 0.3, 0.5, 0.9, 0.999999}) {
    auto f = [m](double t) { return std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); };
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, 0.5 * kPi, 15, 1e-14);
    out.push_back(make_report("elliptic E(" + std::to_string(m) + ")", q, elliptic_e(m), 1e-12,
                              true));
  }

  const std::pair<double, double> variances[] = {{1.0, 1.0}, {1.0, 0.0}, {2.0, 0.5},
                                                 {3.0, 0.2}, {1.0, 1e-6}, {4e-3, 7.0}};
  for (const auto& [a, b] : variances) {
    out.push_back(make_report(
        "gaussian norm (" + std::to_string(a) + "," + std::to_string(b) + ")",
        quadrature_norm_oracle(a, b), gaussian_norm_expectation(a, b), 1e-10, true));
  }

  // Addition theorem closure at random point pairs.
  for (int trial = 0; trial < 5; ++trial) {
    const int l = 1 + static_cast<int>(unit(rng) * 50);
    const SpherePoint x{kPi * unit(rng), 2.0 * kPi * unit(rng)};
    const SpherePoint y{kPi * unit(rng), 2.0 * kPi * unit(rng)};
    const std::vector<double> rx = associated_legendre_row(l, x.theta);
    const std::vector<double> ry = associated_legendre_row(l, y.theta);
    double sum = rx[0] * ry[0];
    for (int m = 1; m <= l; ++m) sum += 2.0 * rx[m] * ry[m] * std::cos(m * (x.phi - y.phi));
    sum *= 4.0 * kPi / (2.0 * l + 1.0);
    out.push_back(make_report("addition theorem l=" + std::to_string(l),
                              legendre_series_oracle(l, cos_distance(x, y)), sum, 1e-10, false));
  }

  // Dirichlet vanishing.
  for (int trial = 0; trial < 3; ++trial) {
    const int l = 1 + static_cast<int>(unit(rng) * 100);
    const SpherePoint x{0.5 * kPi * unit(rng), 2.0 * kPi * unit(rng)};
    const SpherePoint y{0.5 * kPi, 2.0 * kPi * unit(rng)};
    out.push_back(make_report("dirichlet r(x, equator) l=" + std::to_string(l), 0.0,
                              covariance(l, x, y), 1e-12, false));
  }

  // Zero density through the quadrature kernel.
  for (int trial = 0; trial < 5; ++trial) {
    const int l = 2 + static_cast<int>(unit(rng) * 299);
    const double psi = 1.0 + unit(rng) * (kPi * l - 2.0);
    const ConditionalMoments m = conditional_moments(l, psi);
    const double oracle = quadrature_norm_oracle(std::max(m.omega11, 0.0), std::max(m.omega22, 0.0)) /
                          std::sqrt(2.0 * kPi * m.variance);
    out.push_back(make_report("k1 l=" + std::to_string(l) + " quadrature path", oracle,
                              k1_exact(l, psi), 1e-8, true));
  }

  {
    const McEstimate mc = mc_conditional_k1(2, kPi, 1000000, seed ^ 0x9e3779b97f4a7c15ULL);
    OracleReport r = make_report("k1 l=2 psi=pi vs Monte Carlo (3 stderr)", mc.estimate,
                                 k1_exact(2, kPi), 3.0 * mc.standard_error, false);
    out.push_back(r);
  }

  out.push_back(make_report("planar density at h=0.01", 1.0 / (2.0 * kPi),
                            planar_berry_density(0.01), 0.01, true));
  return out;
}

std::vector<OracleReport> run_invariant_suite(std::uint64_t seed) {
  std::vector<OracleReport> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_point = [&](double theta_max) {
    return SpherePoint{theta_max * unit(rng), 2.0 * kPi * unit(rng)};
  };

  double sym = 0.0, diag = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int l = 1 + static_cast<int>(unit(rng) * 100);
    const SpherePoint x = random_point(0.5 * kPi), y = random_point(0.5 * kPi);
    sym = std::max(sym, std::abs(covariance(l, x, y) - covariance(l, y, x)));
    const SpherePoint z{0.02 + (0.5 * kPi - 0.04) * unit(rng), 0.0};
    diag = std::max(diag, std::abs(covariance(l, z, z) - covariance_blocks(l, z.theta).a));
  }
  out.push_back(make_report("covariance symmetry (max abs dev)", 0.0, sym, 1e-12, false));
  out.push_back(make_report("covariance(x,x) = blocks.a (max abs dev)", 0.0, diag, 1e-12, false));

  double psd = 0.0, conditioning = 0.0, lemma = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int l = 2 + static_cast<int>(unit(rng) * 200);
    const double theta = 0.05 + (0.5 * kPi - 0.1) * unit(rng);
    const ConditionalCovariance cc = conditional_covariance(l, theta);
    const CovarianceBlocks b = covariance_blocks(l, theta);
    const double half_lam = 0.5 * l * (l + 1.0);
    psd = std::max(psd, std::max(-cc.omega[0][0], -cc.omega[1][1]) / half_lam);
    conditioning = std::max(conditioning, (cc.omega[0][0] - b.c[0][0]) / half_lam);
    lemma = std::max(lemma, std::abs(cc.omega[0][0] - half_lam * (1.0 + cc.s11)) / half_lam);
    lemma = std::max(lemma, std::abs(cc.omega[1][1] - half_lam * (1.0 + cc.s22)) / half_lam);
  }
  out.push_back(make_report("Omega positive semidefinite (max -entry / (lam/2))", 0.0,
                            std::max(psd, 0.0), 1e-12, false));
  out.push_back(make_report("Omega <= C (max excess / (lam/2))", 0.0, std::max(conditioning, 0.0),
                            1e-12, false));
  out.push_back(make_report("transition formula vs closed form", 0.0, lemma, 1e-9, false));

  double min_k = INFINITY;
  for (int l : {2, 10, 100}) {
    for (int i = 0; i < 60; ++i) {
      const double psi = 1e-3 * std::pow(kPi * l / 1e-3, i / 60.0);
      min_k = std::min(min_k, k1_exact(l, psi));
    }
  }
  OracleReport positivity = make_report("k1 positivity (min value on log grid)", 0.0, min_k, 0.0,
                                        false);
  positivity.pass = min_k > 0.0;
  out.push_back(positivity);

  double branch = 0.0;
  for (int l : {10, 100}) {
    DensityOptions direct, series;
    direct.branch = MomentBranch::direct;
    series.branch = MomentBranch::series;
    for (int i = 0; i <= 50; ++i) {
      const double psi = 0.3 + 0.01 * i;
      branch = std::max(branch, std::abs(k1_exact(l, psi, direct) / k1_exact(l, psi, series) - 1.0));
    }
  }
  out.push_back(make_report("series vs direct branch on [0.3, 0.8]", 0.0, branch, 1e-6, false));

  out.push_back(make_report("expected length l=1", 2.0 * kPi, expected_nodal_length(1).total,
                            1e-15, true));
  out.push_back(make_report("full-sphere baseline = 2 x hemisphere leading term",
                            2.0 * hemisphere_leading_term(37), berard_baseline(37), 1e-14, true));

  {
    // cos(theta) on the full sphere: the equator.
    FieldSample fs;
    fs.degree = 1;
    fs.mode = EnsembleMode::full_sphere;
    fs.grid = default_grid(EnsembleMode::full_sphere, 401, 64);
    fs.values.resize(static_cast<std::size_t>(fs.grid.n_theta) * fs.grid.n_phi);
    for (int i = 0; i < fs.grid.n_theta; ++i) {
      for (int j = 0; j < fs.grid.n_phi; ++j) {
        fs.values[static_cast<std::size_t>(i) * fs.grid.n_phi + j] = std::cos(fs.grid.theta(i) + 0.003);
      }
    }
    out.push_back(make_report("nodal length of a latitude circle", 2.0 * kPi * std::cos(0.003),
                              extract_nodal_length(fs).total_length, 1e-3, true));
  }
  return out;
}

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports) {
  const auto old = out.precision(17);
  out << "quantity,oracle,value,abs_dev,rel_dev,tolerance,tolerance_kind,pass\n";
  for (const auto& r : reports) {
    out << '"' << r.quantity << "\"," << r.oracle << ',' << r.value << ',' << r.abs_dev << ','
        << r.rel_dev << ',' << r.tolerance << ',' << (r.relative ? "relative" : "absolute") << ','
        << (r.pass ? "true" : "false") << '\n';
  }
  out.precision(old);
}

}  // namespace nodalkit
