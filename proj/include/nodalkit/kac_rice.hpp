#pragma once

#include <string>
#include <vector>

#include "nodalkit/density.hpp"

namespace nodalkit {

struct QuadratureOptions {
  int gauss_nodes = 31;          // Gauss-Kronrod rule per panel: 15, 31, 41, 51 or 61
  // A panel is accepted when |Kronrod - Gauss| <= rel_tol * max(|panel|, plateau area).
  double rel_tol = 1e-10;
  int max_bisections = 8;        // cap on adaptive bisection depth within a panel
  double psi_min = 1e-6;         // excision of the equator, in psi
  double eps0 = 0.5;             // H_C = (psi_min, eps0)
  double far_c = 10.0;           // H_I = [eps0, far_c), H_F = [far_c, pi l]
  double far_panel_width = 0.5 * 3.14159265358979323846;  // max panel width in psi beyond far_c
  bool far_substitution = false;  // integrate k1_far_asymptotic on H_F instead of k1_exact
  DensityOptions density{};
};

struct QuadratureDiagnostics {
  int panels = 0;
  int evaluations = 0;
  int max_depth = 0;
  int noise_limited_panels = 0;  // hit the depth cap with error below 1e-7 relative
  double excision_bound = 0.0;  // upper bound on the dropped (0, psi_min) contribution
};

struct NodalLengthPrediction {
  int degree = 0;
  double total = 0.0;       // expected nodal length including the equator
  double leading = 0.0;     // 2 pi sqrt(l (l+1)) / (2 sqrt 2)
  double deficiency = 0.0;  // total - leading
  double hc = 0.0;          // contribution of psi in (psi_min, eps0)
  double hi = 0.0;          // psi in [eps0, far_c)
  double hf = 0.0;          // psi in [far_c, pi l]
  QuadratureDiagnostics diagnostics;
};

double hemisphere_leading_term(int degree);

// E[L] = 2 pi + (pi / l) int_0^{pi l} K(psi) cos(psi / 2l) dpsi.
NodalLengthPrediction expected_nodal_length(int degree, const QuadratureOptions& opts = {});

// Same integral over (psi_lo, pi l] only; used for excision studies.
double kac_rice_integral(int degree, double psi_lo, const QuadratureOptions& opts = {});

struct DeficiencyFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<int> degrees;
  std::vector<double> deficiencies;
  std::vector<double> residuals;
};

// Least-squares line through (log l_i, y_i). Needs >= 5 points spanning a
// decade of degrees; throws DomainError otherwise.
DeficiencyFit fit_log_slope(const std::vector<int>& degrees, const std::vector<double>& values);

DeficiencyFit deficiency_fit(const std::vector<int>& degrees, const QuadratureOptions& opts = {});

// Expected nodal length of the isotropic degree-l field on the whole sphere:
// the density sqrt(l (l+1)) / (2 sqrt 2) times the area 4 pi.
double berard_baseline(int degree);

std::string prediction_csv_header();
std::string prediction_csv_row(const NodalLengthPrediction& p);

}  // namespace nodalkit
