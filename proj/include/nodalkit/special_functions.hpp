#pragma once

#include <vector>

namespace nodalkit {

struct LegendreTriple {
  double p = 0.0;    // P_l(x)
  double dp = 0.0;   // P_l'(x)
  double ddp = 0.0;  // P_l''(x)
};

// P_l, P_l', P_l'' by the three-term recurrence. The derivatives use
// P'_{n+1} = P'_{n-1} + (2n+1) P_n (and likewise one order up), which stays
// accurate at x = +-1 where the usual (1-x^2) forms break down.
LegendreTriple legendre_triple(int degree, double x);

// theta-part of orthonormal complex harmonics, index m = 0..l:
//   Y_lm(theta, phi) = row[m] * exp(i m phi),  Y_{l,-m} = conj(Y_lm).
// Condon-Shortley phase included. Normalized so that
//   sum_{m=-l}^{l} |Y_lm|^2 = (2l+1) / (4 pi).
std::vector<double> associated_legendre_row(int degree, double theta);

// d/dtheta of every entry of associated_legendre_row(degree, theta).
std::vector<double> associated_legendre_theta_derivative_row(int degree, double theta);

// Both rows at once; cheaper when the caller needs values and derivatives.
void associated_legendre_rows(int degree, double theta, std::vector<double>& values,
                              std::vector<double>* theta_derivatives);

// As above with cos(theta) and sin(theta) supplied by the caller, e.g. to pin
// the equator to cos = 0 exactly. Requires sin_theta >= 0.
void associated_legendre_rows_cs(int degree, double cos_theta, double sin_theta,
                                 std::vector<double>& values,
                                 std::vector<double>* theta_derivatives);

// J0 by power series (x < 12) or the two-series Hankel asymptotic form.
double bessel_j0(double x);

struct BesselJ0Derivatives {
  double j0 = 0.0;
  double d1 = 0.0;  // J0'(x) = -J1(x)
  double d2 = 0.0;  // J0''(x)
};
BesselJ0Derivatives bessel_j0_derivatives(double x);

// Complete elliptic integral of the second kind, E(m) = int_0^{pi/2} sqrt(1 - m sin^2 t) dt.
double elliptic_e(double m);

// E[sqrt(var1 X^2 + var2 Y^2)] for independent standard normals X, Y.
//   = sqrt(2/pi) * sqrt(hi) * E(1 - lo/hi),  hi = max(var1, var2), lo = min.
double gaussian_norm_expectation(double var1, double var2);

}  // namespace nodalkit
