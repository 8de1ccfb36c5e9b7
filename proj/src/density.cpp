#include "nodalkit/density.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "nodalkit/errors.hpp"
#include "nodalkit/parallel.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

using Poly = std::vector<long double>;

Poly multiply(const Poly& p, const Poly& q) {
  Poly r(p.size() + q.size() - 1, 0.0L);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  }
  return r;
}

long double horner(const Poly& p, std::size_t first, long double t) {
  long double acc = 0.0L;
  for (std::size_t k = p.size(); k-- > first;) acc = acc * t + p[k];
  return acc;
}

// Expansion of P_l(1 - 2t) = sum_k f_k t^k (a finite sum). Returns
// variance 1 - P, the numerator N = C11 * A - B1^2 (whose t^0..t^2
// coefficients vanish identically), and the tangential entry
// (F'(t) - F'(0)) / 2, each as an exact function of t.
struct SeriesParts {
  long double variance;
  long double numerator;
  long double c22;
};

SeriesParts series_parts(int degree, long double t) {
  const long double lam = static_cast<long double>(degree) * (degree + 1.0L);
  const int terms = std::min(degree, 40);
  Poly f(terms + 1);
  long double c = 1.0L;
  f[0] = 1.0L;
  for (int k = 1; k <= terms; ++k) {
    c *= (lam - static_cast<long double>(k) * (k - 1)) / (static_cast<long double>(k) * k);
    f[k] = (k % 2 == 0) ? c : -c;
  }
  Poly a(terms + 1, 0.0L);
  for (int k = 1; k <= terms; ++k) a[k] = -f[k];
  Poly fp(terms, 0.0L);
  for (int j = 0; j < terms; ++j) fp[j] = (j + 1.0L) * f[j + 1];
  Poly fpp(std::max(terms - 1, 1), 0.0L);
  for (int j = 0; j + 2 <= terms; ++j) fpp[j] = (j + 2.0L) * (j + 1.0L) * f[j + 2];

  // C11 = -F'(0)/2 - (1 - 2t) F'/2 - t (1 - t) F''
  Poly c11(terms + 2, 0.0L);
  c11[0] += -0.5L * fp[0];
  const Poly one_minus_2t{1.0L, -2.0L};
  const Poly t_one_minus_t{0.0L, 1.0L, -1.0L};
  const Poly lin = multiply(one_minus_2t, fp);
  for (std::size_t k = 0; k < lin.size(); ++k) c11[k] -= 0.5L * lin[k];
  const Poly quad = multiply(t_one_minus_t, fpp);
  if (quad.size() > c11.size()) c11.resize(quad.size(), 0.0L);
  for (std::size_t k = 0; k < quad.size(); ++k) c11[k] -= quad[k];

  Poly n = multiply(c11, a);
  const Poly b2 = multiply(t_one_minus_t, multiply(fp, fp));
  if (b2.size() > n.size()) n.resize(b2.size(), 0.0L);
  for (std::size_t k = 0; k < b2.size(); ++k) n[k] -= b2[k];

  SeriesParts out;
  out.variance = horner(a, 1, t) * t;
  out.numerator = horner(n, 3, t) * t * t * t;
  out.c22 = 0.5L * horner(fp, 1, t) * t;
  return out;
}

void check_degree(int degree) {
  if (degree < 1) throw DomainError("degree must be at least 1");
}

void check_psi(int degree, double psi) {
  if (!(psi > 0.0)) {
    throw DegenerateVarianceError("psi <= 0: the field vanishes on the boundary");
  }
  if (!(psi <= kPi * degree)) throw DomainError("psi exceeds pi * degree");
  if (psi == kPi * degree && degree % 2 == 0) {
    throw DegenerateVarianceError("field variance vanishes at the pole for even degree");
  }
}

ConditionalMoments direct_moments(int degree, double psi) {
  const double u = psi / degree;
  // 1 - 2 sin^2(u/2) keeps 1 - cos u accurate for small u.
  const double sh = std::sin(0.5 * u);
  const double cu = 1.0 - 2.0 * sh * sh;
  const double su = std::sin(u);
  const LegendreTriple lt = legendre_triple(degree, std::max(-1.0, std::min(1.0, cu)));
  const double dp1 = 0.5 * degree * (degree + 1.0);
  ConditionalMoments m;
  m.variance = 1.0 - lt.p;
  if (!(m.variance > 0.0)) throw DegenerateVarianceError("field variance underflows");
  const double c11 = dp1 + cu * lt.dp - su * su * lt.ddp;
  m.omega11 = c11 - su * su * lt.dp * lt.dp / m.variance;
  m.omega22 = dp1 - lt.dp;
  return m;
}

ConditionalMoments series_moments(int degree, double psi) {
  const long double t = std::pow(std::sin(static_cast<long double>(psi) / (2.0L * degree)), 2);
  const SeriesParts sp = series_parts(degree, t);
  ConditionalMoments m;
  m.variance = static_cast<double>(sp.variance);
  if (!(m.variance > 0.0)) throw DegenerateVarianceError("field variance underflows");
  m.omega11 = static_cast<double>(sp.numerator / sp.variance);
  m.omega22 = static_cast<double>(sp.c22);
  m.used_series = true;
  return m;
}

// Even degree near the pole: the variance and the normal entry follow the same
// expansion in the distance to the pole; the tangential entry does not vanish.
ConditionalMoments pole_moments(int degree, double psi) {
  const double pole_gap = kPi * degree - psi;
  ConditionalMoments m = series_moments(degree, pole_gap);
  const double u = psi / degree;
  const LegendreTriple lt = legendre_triple(degree, std::max(-1.0, std::cos(u)));
  m.omega22 = 0.5 * degree * (degree + 1.0) - lt.dp;
  return m;
}

double clamp_small_negative(double v, double scale) {
  if (v >= 0.0) return v;
  if (v > -1e-10 * scale) return 0.0;
  throw NumericalFailure("conditional covariance lost positivity");
}

}  // namespace

ConditionalMoments conditional_moments(int degree, double psi, const DensityOptions& opts) {
  check_degree(degree);
  check_psi(degree, psi);
  switch (opts.branch) {
    case MomentBranch::direct:
      return direct_moments(degree, psi);
    case MomentBranch::series:
      return series_moments(degree, psi);
    case MomentBranch::automatic:
      break;
  }
  if (psi < opts.psi_switch) return series_moments(degree, psi);
  if (degree % 2 == 0 && kPi * degree - psi < opts.psi_switch) return pole_moments(degree, psi);
  return direct_moments(degree, psi);
}

double isotropic_plateau(int degree) {
  return std::sqrt(degree * (degree + 1.0)) / (2.0 * kSqrt2);
}

double k1_exact(int degree, double psi, const DensityOptions& opts) {
  const ConditionalMoments m = conditional_moments(degree, psi, opts);
  // Degree one: the only Dirichlet field is a multiple of cos(theta), which has
  // no zeros off the equator.
  if (degree == 1) return 0.0;
  const double scale = degree * (degree + 1.0);
  const double o11 = clamp_small_negative(m.omega11, scale);
  const double o22 = clamp_small_negative(m.omega22, scale);
  // Odd degree at the pole: m = 1 is inactive, so the gradient vanishes there.
  if (std::max(o11, o22) <= 1e-14 * scale) return 0.0;
  return gaussian_norm_expectation(o11, o22) / std::sqrt(2.0 * kPi * m.variance);
}

namespace {

void check_far(int degree, double psi, double far_c) {
  check_degree(degree);
  if (!(psi > far_c)) throw DomainError("far-field expansion requires psi > C");
}

double far_bracket(int degree, double psi, double amplitude) {
  const double phase = (degree + 0.5) * psi / degree;
  return 1.0 + kSqrt2OverPi * amplitude * std::cos(phase - 0.25 * kPi) -
         1.0 / (16.0 * kPi * psi) +
         15.0 / (16.0 * kPi * psi) * std::cos(2.0 * phase - 0.5 * kPi);
}

}  // namespace

double k1_far_asymptotic(int degree, double psi, double far_c) {
  check_far(degree, psi, far_c);
  return isotropic_plateau(degree) * far_bracket(degree, psi, 1.0 / std::sqrt(psi));
}

double k1_far_asymptotic_curved(int degree, double psi, double far_c) {
  check_far(degree, psi, far_c);
  const double amp = 1.0 / std::sqrt(degree * std::sin(psi / degree));
  return isotropic_plateau(degree) * far_bracket(degree, psi, amp);
}

double k1_near_asymptotic(int degree, double /*psi*/) {
  check_degree(degree);
  return degree / (2.0 * kPi);
}

double taylor_correction(int degree, double s, double s11, double s22) {
  const double tr = s11 + s22;
  const double tr_sq = s11 * s11 + s22 * s22;
  const double bracket = s + 0.5 * tr + 0.75 * s * s + 0.25 * s * tr - tr_sq / 16.0 -
                         tr * tr / 32.0;
  return std::sqrt(degree * (degree + 1.0)) / (4.0 * kSqrt2) * bracket;
}

TaylorExpansion taylor_leading_term(int degree, double psi, double far_c) {
  check_far(degree, psi, far_c);
  const ConditionalMoments m = conditional_moments(degree, psi);
  const double half_lam = 0.5 * degree * (degree + 1.0);
  TaylorExpansion out;
  out.plateau = isotropic_plateau(degree);
  out.s = 1.0 - m.variance;
  out.s11 = m.omega11 / half_lam - 1.0;
  out.s22 = m.omega22 / half_lam - 1.0;
  out.correction = taylor_correction(degree, out.s, out.s11, out.s22);
  return out;
}

LegendreTriple hilb_legendre_asymptotics(int degree, double psi, double far_c) {
  check_far(degree, psi, far_c);
  if (!(psi < kPi * degree)) throw DomainError("psi must be below pi * degree");
  const double l = degree;
  const double phase = (l + 0.5) * psi / l - 0.25 * kPi;
  const double sn = std::sin(psi / l);
  LegendreTriple out;
  out.p = kSqrt2OverPi / std::sqrt(psi) * std::cos(phase);
  out.dp = kSqrt2OverPi * std::sqrt(l) * std::sin(phase) / std::pow(sn, 1.5);
  out.ddp = -kSqrt2OverPi * std::pow(l, 1.5) * std::cos(phase) / std::pow(sn, 2.5);
  return out;
}

SMatrixApprox s_matrix_asymptotic(int degree, double psi) {
  check_degree(degree);
  if (!(psi > 0.0)) throw DomainError("psi must be positive");
  const double phase = (degree + 0.5) * psi / degree - 0.25 * kPi;
  const double sp = std::sin(phase);
  SMatrixApprox out;
  out.s11 = 2.0 * kSqrt2OverPi / std::sqrt(psi) * std::cos(phase) - 4.0 / (kPi * psi) * sp * sp;
  out.s22 = -2.0 * kSqrt2OverPi * std::pow(psi, -1.5) * sp;
  return out;
}

namespace {

constexpr double kPlanarSeriesLimit = 2.0;  // in z = 2h

// Small-z planar moments as power series in q = z^2 / 4. Returns
// V = 1 - J0, tangential Omega_11 = 1/2 + J0'/z, and N = C22 V - J1^2,
// the last with its vanishing q^0..q^2 coefficients dropped.
struct PlanarSeries {
  long double variance;
  long double omega_t;
  long double numerator;
};

PlanarSeries planar_series(double z) {
  constexpr int kTerms = 30;
  const long double q = 0.25L * static_cast<long double>(z) * z;
  Poly alpha(kTerms + 1);
  long double c = 1.0L;
  alpha[0] = 1.0L;
  for (int k = 1; k <= kTerms; ++k) {
    c /= static_cast<long double>(k) * k;
    alpha[k] = (k % 2 == 0) ? c : -c;
  }
  // s(q) = sum_{k>=1} k alpha_k q^{k-1}; J0'(z)/z = s/2 and J1^2 = q s^2.
  Poly s(kTerms, 0.0L);
  for (int k = 1; k <= kTerms; ++k) s[k - 1] = k * alpha[k];
  Poly v(kTerms + 1, 0.0L);
  for (int k = 1; k <= kTerms; ++k) v[k] = -alpha[k];
  Poly c22(kTerms + 1, 0.0L);
  c22[0] = 0.5L;
  for (int k = 0; k <= kTerms; ++k) c22[k] += alpha[k];
  for (int k = 0; k < kTerms; ++k) c22[k] += 0.5L * s[k];
  Poly n = multiply(c22, v);
  const Poly s2 = multiply(s, s);
  for (std::size_t k = 0; k < s2.size() && k + 1 < n.size(); ++k) n[k + 1] -= s2[k];

  PlanarSeries out;
  out.variance = horner(v, 1, q) * q;
  // 1/2 + s/2 = (1 + s_0)/2 + ... with s_0 = -1.
  out.omega_t = 0.5L * horner(s, 1, q) * q;
  out.numerator = horner(n, 3, q) * q * q * q;
  return out;
}

}  // namespace

double planar_berry_density(double height) {
  if (!(height > 0.0)) throw DomainError("planar_berry_density: height must be positive");
  const double z = 2.0 * height;
  double variance, omega_t, omega_n;
  if (z < kPlanarSeriesLimit) {
    const PlanarSeries ps = planar_series(z);
    variance = static_cast<double>(ps.variance);
    omega_t = static_cast<double>(ps.omega_t);
    omega_n = static_cast<double>(ps.numerator / ps.variance);
  } else {
    const BesselJ0Derivatives j = bessel_j0_derivatives(z);
    variance = 1.0 - j.j0;
    omega_t = 0.5 + j.d1 / z;
    const double c22 = 0.5 - j.d2;
    omega_n = c22 - j.d1 * j.d1 / variance;
  }
  omega_t = clamp_small_negative(omega_t, 1.0);
  omega_n = clamp_small_negative(omega_n, 1.0);
  return gaussian_norm_expectation(omega_t, omega_n) / std::sqrt(2.0 * kPi * variance);
}

double planar_large_height(double height, bool include_one_over_h) {
  if (!(height > 0.0)) throw DomainError("planar_large_height: height must be positive");
  double bracket = 1.0 + std::cos(2.0 * height - 0.25 * kPi) / std::sqrt(kPi * height);
  if (include_one_over_h) bracket -= 1.0 / (32.0 * kPi * height);
  return bracket / (2.0 * kSqrt2);
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::exact: return "exact";
    case Regime::far: return "far";
    case Regime::near: return "near";
  }
  return "unknown";
}

DensityProfile density_profile(int degree, const std::vector<double>& psi_grid, Regime regime,
                               const DensityOptions& opts) {
  check_degree(degree);
  for (std::size_t i = 0; i < psi_grid.size(); ++i) {
    if (!(psi_grid[i] > 0.0 && psi_grid[i] < kPi * degree)) {
      throw DomainError("density_profile: psi outside (0, pi l)");
    }
    if (i > 0 && !(psi_grid[i] > psi_grid[i - 1])) {
      throw DomainError("density_profile: psi grid must be strictly increasing");
    }
  }
  DensityProfile profile;
  profile.degree = degree;
  profile.samples.resize(psi_grid.size());
  parallel_for(psi_grid.size(), [&](std::size_t i) {
    const double psi = psi_grid[i];
    double value = 0.0;
    switch (regime) {
      case Regime::exact: value = k1_exact(degree, psi, opts); break;
      case Regime::far: value = k1_far_asymptotic(degree, psi, opts.far_c); break;
      case Regime::near: value = k1_near_asymptotic(degree, psi); break;
    }
    profile.samples[i] = {psi, value, regime};
  });
  return profile;
}

void write_profile_csv(std::ostream& out, const DensityProfile& profile) {
  const auto old_precision = out.precision(17);
  out << "psi,value,regime\n";
  for (const auto& s : profile.samples) {
    out << s.psi << ',' << s.value << ',' << regime_name(s.regime) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace nodalkit
