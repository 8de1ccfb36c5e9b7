#include "nodalkit/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "nodalkit/errors.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBesselCrossover = 12.0;

// Scaling for the associated Legendre recurrence: values are carried as
// mantissa * 2^exponent while they are far below the double range.
constexpr int kRescaleBits = 512;
const double kRescaleUp = std::ldexp(1.0, kRescaleBits);
const double kRescaleThreshold = std::ldexp(1.0, 600);

}  // namespace

LegendreTriple legendre_triple(int degree, double x) {
  if (degree < 0) throw DomainError("legendre_triple: negative degree");
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("legendre_triple: argument outside [-1, 1]");
  if (degree == 0) return {1.0, 0.0, 0.0};
  if (x == 1.0) {
    const double l = degree;
    const double lam = l * (l + 1.0);
    return {1.0, 0.5 * lam, (lam - 2.0) * lam / 8.0};
  }

  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  double e0 = 0.0, e1 = 0.0;
  for (int n = 1; n < degree; ++n) {
    const double two_n1 = 2.0 * n + 1.0;
    const double p2 = (two_n1 * x * p1 - n * p0) / (n + 1.0);
    const double d2 = d0 + two_n1 * p1;
    const double e2 = e0 + two_n1 * d1;
    p0 = p1; p1 = p2;
    d0 = d1; d1 = d2;
    e0 = e1; e1 = e2;
  }
  return {p1, d1, e1};
}

void associated_legendre_rows(int degree, double theta, std::vector<double>& values,
                              std::vector<double>* theta_derivatives) {
  if (degree < 0) throw DomainError("associated_legendre_row: negative degree");
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("associated_legendre_row: colatitude outside [0, pi]");
  }
  const double s = (theta == kPi) ? 0.0 : std::sin(theta);
  associated_legendre_rows_cs(degree, std::cos(theta), s, values, theta_derivatives);
}

void associated_legendre_rows_cs(int degree, double c, double s, std::vector<double>& values,
                                 std::vector<double>* theta_derivatives) {
  if (degree < 0) throw DomainError("associated_legendre_row: negative degree");
  if (!(s >= 0.0 && s <= 1.0 && std::abs(c) <= 1.0)) {
    throw DomainError("associated_legendre_row: invalid cos/sin pair");
  }
  const int L = degree;
  values.assign(L + 1, 0.0);

  // Diagonal term P_mm in mantissa/exponent form.
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  int pmm_exp = 0;
  for (int m = 0; m <= L; ++m) {
    if (m > 0) {
      pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      if (pmm == 0.0) break;  // sin(theta) == 0: every higher order vanishes
      int e = 0;
      pmm = std::frexp(pmm, &e);
      pmm_exp += e;
    }
    // Upward recurrence in l at fixed m, on the scaled mantissa.
    double prev = 0.0;
    double cur = pmm;
    int exp = pmm_exp;
    if (L == m) {
      values[m] = std::ldexp(cur, exp);
      continue;
    }
    for (int l = m + 1; l <= L; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double next = a * (c * cur - b * prev);
      prev = cur;
      cur = next;
      if (std::abs(cur) > kRescaleThreshold) {
        cur = std::ldexp(cur, -kRescaleBits);
        prev = std::ldexp(prev, -kRescaleBits);
        exp += kRescaleBits;
      }
    }
    values[m] = std::ldexp(cur, exp);
  }

  if (theta_derivatives != nullptr) {
    // Ladder relation, valid at the poles as well:
    //   dY_m/dtheta = (sqrt((l-m)(l+m+1)) Y_{m+1} - sqrt((l+m)(l-m+1)) Y_{m-1}) / 2
    // with Y_{-1} = -Y_1 under the Condon-Shortley convention.
    auto& d = *theta_derivatives;
    d.assign(L + 1, 0.0);
    const double l = L;
    if (L == 0) return;
    d[0] = std::sqrt(l * (l + 1.0)) * values[1];
    for (int m = 1; m <= L; ++m) {
      const double mm = m;
      const double up = (m < L) ? std::sqrt((l - mm) * (l + mm + 1.0)) * values[m + 1] : 0.0;
      const double down = std::sqrt((l + mm) * (l - mm + 1.0)) * values[m - 1];
      d[m] = 0.5 * (up - down);
    }
  }
}

std::vector<double> associated_legendre_row(int degree, double theta) {
  std::vector<double> row;
  associated_legendre_rows(degree, theta, row, nullptr);
  return row;
}

std::vector<double> associated_legendre_theta_derivative_row(int degree, double theta) {
  std::vector<double> row, deriv;
  associated_legendre_rows(degree, theta, row, &deriv);
  return deriv;
}

namespace {

// Power series for J0 and its first two derivatives, accumulated in long double.
BesselJ0Derivatives bessel_j0_series(double x) {
  const long double q = 0.25L * static_cast<long double>(x) * x;
  long double term = 1.0L;  // (-q)^k / (k!)^2
  long double j0 = 1.0L;
  long double term1 = 1.0L;  // (-q)^k / (k! (k+1)!)
  long double j1_over_half_x = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    term1 *= -q / (static_cast<long double>(k) * (k + 1));
    j0 += term;
    j1_over_half_x += term1;
    if (std::abs(term) < 1e-22L * std::abs(j0) && std::abs(term1) < 1e-22L) break;
  }
  const long double j1 = 0.5L * x * j1_over_half_x;
  BesselJ0Derivatives out;
  out.j0 = static_cast<double>(j0);
  out.d1 = static_cast<double>(-j1);
  // J0'' = -J0 - J0'/x = -J0 + J1/x; J1/x = j1_over_half_x / 2 avoids the division.
  out.d2 = static_cast<double>(-j0 + 0.5L * j1_over_half_x);
  return out;
}

// Hankel asymptotic form:
//   J0(x) = sqrt(2/(pi x)) [cos(x - pi/4) sum_k (-1)^k a_{2k} x^{-2k}
//                          + cos(x + pi/4) sum_k (-1)^k a_{2k+1} x^{-2k-1}]
// with a_k = prod_{j<=k} (-(2j-1)^2) / (k! 8^k). Summation stops at the
// smallest term; the x-derivative is taken term by term.
BesselJ0Derivatives bessel_j0_asymptotic(double x) {
  // Even and odd sums and their x-derivatives.
  double pe = 0.0, dpe = 0.0;
  double po = 0.0, dpo = 0.0;
  double a = 1.0;  // |a_k| x^{-k}
  double last = INFINITY;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) a *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (a > last) break;
    last = a;
    const int half = k / 2;
    const double sign_k = (k % 2 == 0) ? 1.0 : -1.0;
    const double sign_half = (half % 2 == 0) ? 1.0 : -1.0;
    const double t = sign_k * sign_half * a;
    const double dt = -k * t / x;
    if (k % 2 == 0) {
      pe += t;
      dpe += dt;
    } else {
      po += t;
      dpo += dt;
    }
    if (a < 1e-18) break;
  }
  const double wm = x - 0.25 * kPi;
  const double wp = x + 0.25 * kPi;
  const double cm = std::cos(wm), sm = std::sin(wm);
  const double cp = std::cos(wp), sp = std::sin(wp);
  const double pref = std::sqrt(2.0 / (kPi * x));
  const double bracket = cm * pe + cp * po;
  const double dbracket = -sm * pe + cm * dpe - sp * po + cp * dpo;
  BesselJ0Derivatives out;
  out.j0 = pref * bracket;
  out.d1 = pref * (dbracket - 0.5 * bracket / x);
  out.d2 = -out.j0 - out.d1 / x;
  return out;
}

}  // namespace

BesselJ0Derivatives bessel_j0_derivatives(double x) {
  if (!(x >= 0.0)) throw DomainError("bessel_j0: negative argument");
  return x < kBesselCrossover ? bessel_j0_series(x) : bessel_j0_asymptotic(x);
}

double bessel_j0(double x) { return bessel_j0_derivatives(x).j0; }

namespace {

// E via AGM given both m and its complement 1 - m, so callers holding an
// accurate complement avoid the rounding of 1 - (1 - m).
double elliptic_e_agm(double m, double complement) {
  if (complement == 0.0) return 1.0;
  double a = 1.0;
  double b = std::sqrt(complement);
  double c2 = m;
  double weight = 0.5;
  double sum = weight * c2;
  for (int n = 0; n < 64; ++n) {
    const double an = 0.5 * (a + b);
    const double cn = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    weight *= 2.0;
    c2 = cn * cn;
    sum += weight * c2;
    if (std::abs(cn) <= 1e-15 * a) {
      return 0.5 * kPi / a * (1.0 - sum);
    }
  }
  throw NumericalFailure("elliptic_e: AGM did not converge");
}

}  // namespace

double elliptic_e(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("elliptic_e: parameter outside [0, 1]");
  return elliptic_e_agm(m, 1.0 - m);
}

double gaussian_norm_expectation(double var1, double var2) {
  if (!(var1 >= 0.0 && var2 >= 0.0)) {
    throw DomainError("gaussian_norm_expectation: negative variance");
  }
  const double hi = std::max(var1, var2);
  const double lo = std::min(var1, var2);
  if (hi == 0.0) throw DegenerateVarianceError("gaussian_norm_expectation: both variances are zero");
  const double ratio = lo / hi;
  return std::sqrt(2.0 / kPi) * std::sqrt(hi) * elliptic_e_agm(1.0 - ratio, ratio);
}

}  // namespace nodalkit
