#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nodalkit/special_functions.hpp"

namespace nodalkit {

enum class MomentBranch {
  automatic,  // series near the equator (and near the pole for even degree), direct elsewhere
  direct,     // Legendre values at cos(psi / l), transition formula
  series,     // expansion in t = sin^2(psi / 2l); only sensible for small psi
};

struct DensityOptions {
  double far_c = 10.0;      // lower end of the far-field regime
  double psi_switch = 0.5;  // below this, variance and Omega come from the series
  MomentBranch branch = MomentBranch::automatic;
};

// Variance of T and the diagonal of the conditional gradient covariance at scaled
// distance psi from the equator.
struct ConditionalMoments {
  double variance = 0.0;
  double omega11 = 0.0;
  double omega22 = 0.0;
  bool used_series = false;
};

// psi in (0, pi l]; psi = pi l (the pole) only for odd l.
ConditionalMoments conditional_moments(int degree, double psi, const DensityOptions& opts = {});

// Zero density K(psi) = E[|grad T| | T = 0] / sqrt(2 pi Var T).
double k1_exact(int degree, double psi, const DensityOptions& opts = {});

// Oscillatory far-field expansion, valid for psi > far_c:
//   plateau * [1 + sqrt(2/pi) psi^{-1/2} cos(phi - pi/4) - 1/(16 pi psi)
//              + 15/(16 pi psi) cos(2 phi - pi/2)],   phi = (l + 1/2) psi / l.
double k1_far_asymptotic(int degree, double psi, double far_c = 10.0);

// Same expansion with the first-order amplitude taken as (l sin(psi/l))^{-1/2}
// instead of psi^{-1/2}; stays accurate when psi/l is not small.
double k1_far_asymptotic_curved(int degree, double psi, double far_c = 10.0);

// Leading near-boundary value l / (2 pi).
double k1_near_asymptotic(int degree, double psi = 0.0);

// sqrt(l (l+1)) / (2 sqrt 2): the isotropic density.
double isotropic_plateau(int degree);

// Second-order Taylor correction to the plateau in terms of
// s = P_l(cos(psi/l)) and the diagonal entries of S:
//   (sqrt(lam) / (4 sqrt 2)) [s + tr/2 + 3 s^2/4 + s tr/4 - tr(S^2)/16 - tr^2/32]
double taylor_correction(int degree, double s, double s11, double s22);

struct TaylorExpansion {
  double plateau = 0.0;
  double correction = 0.0;  // L(psi)
  double s = 0.0;
  double s11 = 0.0;
  double s22 = 0.0;
  double total() const { return plateau + correction; }
};

// Evaluates the expansion with exact s and S; psi must exceed far_c.
TaylorExpansion taylor_leading_term(int degree, double psi, double far_c = 10.0);

// Leading oscillatory approximations of P_l, P_l', P_l'' at cos(psi / l).
LegendreTriple hilb_legendre_asymptotics(int degree, double psi, double far_c = 10.0);

struct SMatrixApprox {
  double s11 = 0.0;
  double s22 = 0.0;
};
SMatrixApprox s_matrix_asymptotic(int degree, double psi);

// Zero density of the boundary-adapted planar wave with covariance
// J0(|x - y|) - J0(|x - y~|) at height h above the boundary line.
double planar_berry_density(double height);

// Explicit large-height expansion of planar_berry_density:
//   (1 / 2 sqrt 2) [1 + cos(2h - pi/4) / sqrt(pi h) - include_one_over_h / (32 pi h)]
double planar_large_height(double height, bool include_one_over_h = true);

enum class Regime { exact, far, near };
const char* regime_name(Regime regime);

struct DensitySample {
  double psi = 0.0;
  double value = 0.0;
  Regime regime = Regime::exact;
};

struct DensityProfile {
  int degree = 0;
  std::vector<DensitySample> samples;
};

// Evaluates the chosen regime on a strictly increasing grid inside (0, pi l).
DensityProfile density_profile(int degree, const std::vector<double>& psi_grid, Regime regime,
                               const DensityOptions& opts = {});

// Rows "psi,value,regime" with a header line.
void write_profile_csv(std::ostream& out, const DensityProfile& profile);

}  // namespace nodalkit
