#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nodalkit/covariance.hpp"

namespace nodalkit {

enum class EnsembleMode {
  boundary_adapted,  // Dirichlet hemisphere: only m with m - l odd
  full_sphere,       // isotropic degree-l field on the whole sphere
};

const char* mode_name(EnsembleMode mode);
EnsembleMode parse_mode(const std::string& name);

// Gaussian coefficients a_m for m = 0..l. Negative orders are implied by
// a_{-m} = conj(a_m). a_0 is real; for m > 0, a_m = (u + i v) / sqrt(2).
struct CoefficientSet {
  int degree = 0;
  EnsembleMode mode = EnsembleMode::boundary_adapted;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<std::complex<double>> entries;  // index m; zero where m is inactive

  bool active(int m) const;
  // Any m in [-l, l].
  std::complex<double> coefficient(int m) const;
  int real_degrees_of_freedom() const;
  // sqrt(8 pi / (2l+1)) or sqrt(4 pi / (2l+1)).
  double normalization() const;
};

// Deterministic in (seed, replicate): each replicate owns its own generator,
// so results do not depend on evaluation order or thread count.
CoefficientSet sample_coefficients(int degree, EnsembleMode mode, std::uint64_t seed,
                                   std::uint64_t replicate = 0);

// Rotation about the polar axis by `shift` radians: T(theta, phi) -> T(theta, phi - shift).
CoefficientSet rotate_azimuth(const CoefficientSet& coeffs, double shift);

// theta_i = i * theta_max / (n_theta - 1), i = 0..n_theta-1 (both ends included);
// phi_j = 2 pi j / n_phi, periodic.
struct GridSpec {
  int n_theta = 0;
  int n_phi = 0;
  double theta_max = 1.5707963267948966;

  double theta(int i) const;
  double phi(int j) const;
  // True when the last row sits on the equator.
  bool ends_on_equator() const;
  void validate() const;
};

// Grid appropriate for a mode: [0, pi/2] or [0, pi].
GridSpec default_grid(EnsembleMode mode, int n_theta, int n_phi);

struct FieldSample {
  GridSpec grid;
  int degree = 0;
  EnsembleMode mode = EnsembleMode::boundary_adapted;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<double> values;  // row-major, n_theta x n_phi
  // Boundary-adapted grids ending on the equator: -dT/dtheta on the equator
  // row (the inward normal derivative). Empty otherwise.
  std::vector<double> normal_derivative;
  std::shared_ptr<const CoefficientSet> coefficients;  // may be null for loaded dumps

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n_phi + j]; }
  double max_abs_on_row(int i) const;
};

// Literal complex sum norm * sum_{m=-l}^{l} a_m Y_lm(theta, phi). The real part
// is the field value; the imaginary part is rounding residue.
std::complex<double> evaluate_field_complex(const CoefficientSet& coeffs, double theta, double phi);
double evaluate_field(const CoefficientSet& coeffs, double theta, double phi);

// Grid synthesis with the Legendre rows and azimuthal tables computed once.
class GridSynthesizer {
 public:
  GridSynthesizer(int degree, EnsembleMode mode, const GridSpec& grid);
  FieldSample synthesize(std::shared_ptr<const CoefficientSet> coeffs) const;
  const GridSpec& grid() const { return grid_; }

 private:
  int degree_;
  EnsembleMode mode_;
  GridSpec grid_;
  std::vector<double> rows_;        // n_theta x (l+1)
  std::vector<double> equator_dtheta_;  // l+1, when the grid ends on the equator
  std::vector<double> cos_table_;   // (l+1) x n_phi
  std::vector<double> sin_table_;
};

FieldSample synthesize_field(const CoefficientSet& coeffs, const GridSpec& grid);

struct CovarianceEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  double exact = 0.0;  // covariance() at the same pair, for convenience
};

// Monte Carlo estimate of E[T(x) T(y)] over `replicates` independent draws.
std::vector<CovarianceEstimate> empirical_covariance(
    int degree, EnsembleMode mode, const std::vector<std::pair<SpherePoint, SpherePoint>>& pairs,
    int replicates, std::uint64_t seed);

// Point values T(x) for many replicates; used by the distributional tests.
std::vector<double> sample_point_values(int degree, EnsembleMode mode, const SpherePoint& x,
                                        int replicates, std::uint64_t seed);

// Little-endian binary dump:
//   char[4] "NKFS", u32 version (1), i32 degree, i32 mode (0 boundary, 1 full),
//   i32 n_theta, i32 n_phi, f64 theta_max, u64 seed, u64 replicate,
//   u32 has_normal_derivative, f64 values[n_theta * n_phi] (row-major),
//   f64 normal_derivative[n_phi] when present.
void write_field_binary(std::ostream& out, const FieldSample& field);
FieldSample read_field_binary(std::istream& in);

}  // namespace nodalkit
