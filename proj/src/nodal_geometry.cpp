#include "nodalkit/nodal_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nodalkit/errors.hpp"
#include "nodalkit/parallel.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;

struct Point {
  double theta, phi;
};

double segment_length(const Point& a, const Point& b) {
  const double dt = b.theta - a.theta;
  const double dp = b.phi - a.phi;
  const double s = std::sin(0.5 * (a.theta + b.theta));
  return std::sqrt(dt * dt + s * s * dp * dp);
}

// Values that are contoured: T itself, or T / cos(theta) for boundary-adapted
// fields so that the zero set is resolved right up to the equator.
class ContourField {
 public:
  ContourField(const FieldSample& field, const ExtractionOptions& opts) : field_(field) {
    const GridSpec& g = field.grid;
    reduced_ = field.mode == EnsembleMode::boundary_adapted && g.theta_max <= 0.5 * kPi;
    if (!reduced_) return;
    const bool on_equator = g.ends_on_equator();
    if (on_equator && field.normal_derivative.empty() && opts.equator_exclusion <= 0.0) {
      throw DomainError(
          "boundary field without its normal derivative needs a positive equator exclusion");
    }
    values_.resize(field.values.size());
    for (int i = 0; i < g.n_theta; ++i) {
      const bool eq_row = on_equator && i == g.n_theta - 1;
      const double c = std::cos(g.theta(i));
      for (int j = 0; j < g.n_phi; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * g.n_phi + j;
        if (eq_row) {
          values_[k] = field.normal_derivative.empty() ? 0.0 : field.normal_derivative[j];
        } else {
          values_[k] = field.values[k] / c;
        }
      }
    }
  }

  double at(int i, int j) const {
    const std::size_t k = static_cast<std::size_t>(i) * field_.grid.n_phi + j;
    return reduced_ ? values_[k] : field_.values[k];
  }

  // Sign-deciding value at a cell centre.
  double centre(int i, int j, double corner_mean) const {
    if (!field_.coefficients) return corner_mean;
    const GridSpec& g = field_.grid;
    const double th = 0.5 * (g.theta(i) + g.theta(i + 1));
    const double ph = g.phi(j) + kPi / g.n_phi;
    const double v = evaluate_field(*field_.coefficients, th, ph);
    return reduced_ ? v / std::cos(th) : v;
  }

 private:
  const FieldSample& field_;
  bool reduced_ = false;
  std::vector<double> values_;
};

bool positive(double v) { return v >= 0.0; }

Point crossing(const Point& a, double va, const Point& b, double vb) {
  const double t = va / (va - vb);
  return {a.theta + t * (b.theta - a.theta), a.phi + t * (b.phi - a.phi)};
}

}  // namespace

bool satisfies_resolution_rule(const GridSpec& grid, int degree) {
  const double need_theta = std::ceil(10.0 * degree * grid.theta_max / (0.5 * kPi) - 1e-9);
  return grid.n_theta >= need_theta && grid.n_phi >= 20 * degree;
}

NodalSegments extract_nodal_length(const FieldSample& field, const ExtractionOptions& opts) {
  const GridSpec& g = field.grid;
  g.validate();
  if (field.values.size() != static_cast<std::size_t>(g.n_theta) * g.n_phi) {
    throw DomainError("field values do not match the grid");
  }
  if (!(opts.equator_exclusion >= 0.0)) throw DomainError("equator exclusion must be >= 0");
  if (opts.check_resolution && !satisfies_resolution_rule(g, field.degree)) {
    std::ostringstream msg;
    msg << "grid " << g.n_theta << "x" << g.n_phi << " too coarse for degree " << field.degree
        << ": need n_theta >= " << std::ceil(10.0 * field.degree * g.theta_max / (0.5 * kPi))
        << " and n_phi >= " << 20 * field.degree;
    throw ResolutionError(msg.str());
  }

  const ContourField f(field, opts);
  NodalSegments out;
  out.equator_convention = field.mode == EnsembleMode::boundary_adapted;
  const double dphi = 2.0 * kPi / g.n_phi;
  const double band_start = 0.5 * kPi - opts.equator_exclusion;

  double total = 0.0;
  std::size_t count = 0;
  auto emit = [&](const Point& a, const Point& b) {
    total += segment_length(a, b);
    ++count;
    if (opts.keep_segments) out.segments.push_back({a.theta, a.phi, b.theta, b.phi});
  };

  for (int i = 0; i + 1 < g.n_theta; ++i) {
    const double th0 = g.theta(i), th1 = g.theta(i + 1);
    if (opts.equator_exclusion > 0.0 && th1 > band_start) continue;
    for (int j = 0; j < g.n_phi; ++j) {
      const int jn = (j + 1) % g.n_phi;
      const double ph0 = j * dphi, ph1 = (j + 1) * dphi;
      const double v00 = f.at(i, j), v01 = f.at(i, jn);
      const double v10 = f.at(i + 1, j), v11 = f.at(i + 1, jn);
      const bool s00 = positive(v00), s01 = positive(v01);
      const bool s10 = positive(v10), s11 = positive(v11);
      if (s00 == s01 && s00 == s10 && s00 == s11) continue;

      const Point p00{th0, ph0}, p01{th0, ph1}, p10{th1, ph0}, p11{th1, ph1};
      // Edges: A (p00-p01), B (p01-p11), C (p10-p11), D (p00-p10).
      std::array<Point, 4> pts{};
      std::array<bool, 4> has{s00 != s01, s01 != s11, s10 != s11, s00 != s10};
      if (has[0]) pts[0] = crossing(p00, v00, p01, v01);
      if (has[1]) pts[1] = crossing(p01, v01, p11, v11);
      if (has[2]) pts[2] = crossing(p10, v10, p11, v11);
      if (has[3]) pts[3] = crossing(p00, v00, p10, v10);
      const int n = has[0] + has[1] + has[2] + has[3];
      if (n == 2) {
        std::array<Point, 2> ends;
        int k = 0;
        for (int e = 0; e < 4; ++e) {
          if (has[e]) ends[k++] = pts[e];
        }
        emit(ends[0], ends[1]);
      } else if (n == 4) {
        const double c = f.centre(i, j, 0.25 * (v00 + v01 + v10 + v11));
        if (positive(c) == s00) {
          // p00 and p11 connected through the centre; cut off p01 and p10.
          emit(pts[0], pts[1]);
          emit(pts[2], pts[3]);
        } else {
          emit(pts[0], pts[3]);
          emit(pts[1], pts[2]);
        }
      }
    }
  }
  out.total_length = total + (out.equator_convention ? 2.0 * kPi : 0.0);
  out.segment_count = count;
  return out;
}

void write_segments_csv(std::ostream& out, const NodalSegments& segs) {
  const auto old = out.precision(17);
  out << "theta1,phi1,theta2,phi2\n";
  for (const auto& s : segs.segments) {
    out << s.theta1 << ',' << s.phi1 << ',' << s.theta2 << ',' << s.phi2 << '\n';
  }
  out.precision(old);
}

NodalLengthResult monte_carlo_nodal_length(int degree, EnsembleMode mode, int replicates,
                                           const GridSpec& grid, std::uint64_t seed,
                                           const ExtractionOptions& opts) {
  if (replicates < 30) throw DomainError("monte_carlo_nodal_length needs at least 30 replicates");
  if (opts.check_resolution && !satisfies_resolution_rule(grid, degree)) {
    throw ResolutionError("grid violates the resolution rule for this degree");
  }
  const GridSynthesizer synth(degree, mode, grid);
  ExtractionOptions local = opts;
  local.keep_segments = false;

  NodalLengthResult res;
  res.degree = degree;
  res.mode = mode;
  res.replicates = replicates;
  res.seed = seed;
  res.values.assign(replicates, 0.0);
  parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    auto coeffs = std::make_shared<const CoefficientSet>(sample_coefficients(degree, mode, seed, r));
    const FieldSample fs = synth.synthesize(coeffs);
    res.values[r] = extract_nodal_length(fs, local).total_length;
  });
  // shifted accumulation: identical replicates give an exact mean and zero spread
  const double shift = res.values.front();
  double s1 = 0.0, s2 = 0.0;
  for (double v : res.values) {
    const double d = v - shift;
    s1 += d;
    s2 += d * d;
  }
  const double mean = shift + s1 / replicates;
  const double var = std::max(0.0, (s2 - s1 * s1 / replicates) / (replicates - 1));
  res.mean = mean;
  res.standard_error = std::sqrt(var / replicates);
  return res;
}

}  // namespace nodalkit
