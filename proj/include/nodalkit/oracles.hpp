#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nodalkit {

// Explicit binomial sum
//   P_l(x) = 2^{-l} sum_k (-1)^k C(l,k) C(2l-2k, l) x^{l-2k}
// accumulated in 50-digit floating point. Degree capped at 60.
double legendre_series_oracle(int degree, double x);

// Same sum with enough working precision for degrees up to 500.
double legendre_series_oracle_wide(int degree, double x);

// E[sqrt(var1 X^2 + var2 Y^2)] by polar decomposition: the radial moment
// int_0^inf r^2 e^{-r^2/2} dr = sqrt(pi/2) is exact, and the angular average
// of sqrt(var1 cos^2 + var2 sin^2) is integrated by adaptive Gauss-Kronrod.
double quadrature_norm_oracle(double var1, double var2);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

// Zero density by sampling grad T | T = 0 ~ N(0, diag(omega11, omega22))
// and averaging the norm, divided by sqrt(2 pi variance).
McEstimate mc_conditional_k1(double omega11, double omega22, double variance, long samples,
                             std::uint64_t seed);

// The same with Omega and the variance from the transition formula at
// theta = (pi - psi / l) / 2.
McEstimate mc_conditional_k1(int degree, double psi, long samples, std::uint64_t seed);

struct OracleReport {
  std::string quantity;
  double oracle = 0.0;
  double value = 0.0;
  double abs_dev = 0.0;
  double rel_dev = 0.0;
  double tolerance = 0.0;
  bool relative = true;  // which deviation the tolerance applies to
  bool pass = false;
};

OracleReport make_report(std::string quantity, double oracle, double value, double tolerance,
                         bool relative);

// Oracle comparisons used by `nodalkit verify`.
std::vector<OracleReport> run_oracle_suite(std::uint64_t seed);

// Structural properties (symmetry, positivity, branch agreement, ...), each
// reported as an observed deviation against its bound.
std::vector<OracleReport> run_invariant_suite(std::uint64_t seed);

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports);

}  // namespace nodalkit
