#include "nodalkit/kac_rice.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nodalkit/errors.hpp"
#include "nodalkit/parallel.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNoiseAcceptance = 1e-7;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void validate(int degree, const QuadratureOptions& opts) {
  if (degree < 1) throw DomainError("degree must be at least 1");
  if (!(opts.psi_min > 0.0)) throw DomainError("psi_min must be positive");
  if (!(opts.eps0 > opts.psi_min && opts.far_c >= opts.eps0)) {
    throw DomainError("region boundaries must satisfy psi_min < eps0 <= C");
  }
  if (!(opts.rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
  if (!(opts.far_panel_width > 0.0)) throw DomainError("far_panel_width must be positive");
  if (opts.max_bisections < 0) throw DomainError("max_bisections must be nonnegative");
  static constexpr int kRules[] = {15, 31, 41, 51, 61};
  if (std::find(std::begin(kRules), std::end(kRules), opts.gauss_nodes) == std::end(kRules)) {
    throw DomainError("gauss_nodes must be one of 15, 31, 41, 51, 61");
  }
}

// Panel breakpoints on [lo, hi]: geometric below eps0, width <= 0.5 up to C,
// width <= far_panel_width beyond.
std::vector<double> breakpoints(int degree, double lo, const QuadratureOptions& opts) {
  const double hi = kPi * degree;
  std::vector<double> pts;
  pts.push_back(lo);
  auto push = [&](double x) {
    if (x > pts.back() && x < hi) pts.push_back(x);
  };
  for (int k = 40; k >= 1; --k) push(opts.eps0 * std::ldexp(1.0, -k));
  push(opts.eps0);
  auto uniform = [&](double a, double b, double width) {
    if (!(b > a)) return;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int i = 1; i <= n; ++i) push(a + (b - a) * i / n);
  };
  uniform(std::max(lo, opts.eps0), std::min(hi, opts.far_c), 0.5);
  push(opts.far_c);
  uniform(std::max(lo, opts.far_c), hi, opts.far_panel_width);
  pts.push_back(hi);
  return pts;
}

// One Gauss-Kronrod application on [a, b]; returns the estimate and the
// |Kronrod - Gauss| error. Boost 1.74 reports that error on the reference
// interval [-1, 1], so it is rescaled by the half-width here.
template <class F>
double gauss_kronrod_once(int nodes, F& f, double a, double b, double* err) {
  using boost::math::quadrature::gauss_kronrod;
  double value = 0.0;
  switch (nodes) {
    case 15: value = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, err); break;
    case 31: value = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, err); break;
    case 41: value = gauss_kronrod<double, 41>::integrate(f, a, b, 0, 0.0, err); break;
    case 51: value = gauss_kronrod<double, 51>::integrate(f, a, b, 0, 0.0, err); break;
    case 61: value = gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, err); break;
    default: throw DomainError("gauss_nodes must be one of 15, 31, 41, 51, 61");
  }
  *err *= 0.5 * (b - a);
  return value;
}

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
  int depth = 0;
  bool converged = true;
  bool noise_limited = false;
};

// Recursive bisection until the local error is below tol * |value| or the
// absolute floor; depth is capped at max_depth.
template <class F>
PanelResult adaptive_panel(int nodes, F& f, double a, double b, double tol, double floor,
                           int depth, int max_depth) {
  PanelResult r;
  r.value = gauss_kronrod_once(nodes, f, a, b, &r.error);
  r.depth = depth;
  if (r.error <= std::max(tol * std::abs(r.value), floor)) return r;
  if (depth >= max_depth) {
    // Rounding noise in K bounds the attainable accuracy; accept a panel whose
    // error is still small in absolute terms and let the caller count it.
    r.converged = r.error <= kNoiseAcceptance * std::abs(r.value);
    r.noise_limited = true;
    return r;
  }
  const double mid = 0.5 * (a + b);
  const PanelResult left = adaptive_panel(nodes, f, a, mid, tol, 0.5 * floor, depth + 1, max_depth);
  const PanelResult right = adaptive_panel(nodes, f, mid, b, tol, 0.5 * floor, depth + 1, max_depth);
  r.value = left.value + right.value;
  r.error = left.error + right.error;
  r.depth = std::max(left.depth, right.depth);
  r.converged = left.converged && right.converged;
  r.noise_limited = left.noise_limited || right.noise_limited;
  return r;
}

struct RegionSums {
  CompensatedSum hc, hi, hf;
  QuadratureDiagnostics diag;
};

RegionSums integrate(int degree, double lo, const QuadratureOptions& opts) {
  const std::vector<double> pts = breakpoints(degree, lo, opts);
  const double weight = kPi / degree;
  const double scale = isotropic_plateau(degree);
  std::atomic<int> evaluations{0};

  auto density = [&](double psi) {
    if (opts.far_substitution && psi >= opts.far_c && psi > opts.density.far_c) {
      return k1_far_asymptotic(degree, psi, opts.density.far_c);
    }
    return k1_exact(degree, psi, opts.density);
  };
  auto integrand = [&](double psi) {
    evaluations.fetch_add(1, std::memory_order_relaxed);
    return weight * density(psi) * std::cos(psi / (2.0 * degree));
  };

  const std::size_t panels = pts.size() - 1;
  std::vector<double> values(panels);
  std::vector<int> depths(panels, 0);
  std::vector<char> noisy(panels, 0);
  parallel_for(panels, [&](std::size_t i) {
    const double a = pts[i], b = pts[i + 1];
    const double floor = opts.rel_tol * weight * scale * (b - a);
    const PanelResult r = adaptive_panel(opts.gauss_nodes, integrand, a, b, opts.rel_tol, floor,
                                         0, opts.max_bisections);
    values[i] = r.value;
    depths[i] = r.depth;
    noisy[i] = r.noise_limited ? 1 : 0;
    if (!r.converged || !std::isfinite(r.value)) {
      std::ostringstream diag;
      diag.precision(17);
      diag << "{\"degree\":" << degree << ",\"panel_lo\":" << a << ",\"panel_hi\":" << b
           << ",\"estimate\":" << r.value << ",\"error\":" << r.error
           << ",\"max_bisections\":" << opts.max_bisections << "}";
      throw NumericalFailure("Kac-Rice quadrature did not converge on a panel", diag.str());
    }
  });

  RegionSums sums;
  for (std::size_t i = 0; i < panels; ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    if (mid < opts.eps0) {
      sums.hc.add(values[i]);
    } else if (mid < opts.far_c) {
      sums.hi.add(values[i]);
    } else {
      sums.hf.add(values[i]);
    }
  }
  sums.diag.panels = static_cast<int>(panels);
  sums.diag.evaluations = evaluations.load();
  sums.diag.max_depth = *std::max_element(depths.begin(), depths.end());
  sums.diag.noise_limited_panels = static_cast<int>(std::count(noisy.begin(), noisy.end(), 1));
  return sums;
}

}  // namespace

double hemisphere_leading_term(int degree) { return 2.0 * kPi * isotropic_plateau(degree); }

double berard_baseline(int degree) {
  if (degree < 1) throw DomainError("degree must be at least 1");
  return std::numbers::sqrt2 * kPi * std::sqrt(degree * (degree + 1.0));
}

double kac_rice_integral(int degree, double psi_lo, const QuadratureOptions& opts) {
  validate(degree, opts);
  if (degree == 1) return 0.0;
  if (!(psi_lo > 0.0 && psi_lo < kPi * degree)) throw DomainError("psi_lo outside (0, pi l)");
  RegionSums sums = integrate(degree, psi_lo, opts);
  CompensatedSum total;
  total.add(sums.hc.value());
  total.add(sums.hi.value());
  total.add(sums.hf.value());
  return total.value();
}

NodalLengthPrediction expected_nodal_length(int degree, const QuadratureOptions& opts) {
  validate(degree, opts);
  NodalLengthPrediction out;
  out.degree = degree;
  out.leading = hemisphere_leading_term(degree);
  if (degree == 1) {
    out.total = 2.0 * kPi;
    out.deficiency = out.total - out.leading;
    return out;
  }
  RegionSums sums = integrate(degree, opts.psi_min, opts);
  out.hc = sums.hc.value();
  out.hi = sums.hi.value();
  out.hf = sums.hf.value();
  CompensatedSum total;
  total.add(2.0 * kPi);
  total.add(out.hc);
  total.add(out.hi);
  total.add(out.hf);
  out.total = total.value();
  out.deficiency = out.total - out.leading;
  out.diagnostics = sums.diag;
  // K is increasing towards its boundary value on (0, psi_min); bound it by
  // the value at psi_min with a small margin.
  out.diagnostics.excision_bound =
      1.01 * (kPi / degree) * opts.psi_min * k1_exact(degree, opts.psi_min, opts.density);
  return out;
}

DeficiencyFit fit_log_slope(const std::vector<int>& degrees, const std::vector<double>& values) {
  if (degrees.size() != values.size()) throw DomainError("fit: size mismatch");
  if (degrees.size() < 5) throw DomainError("fit: need at least 5 degrees");
  const auto [mn, mx] = std::minmax_element(degrees.begin(), degrees.end());
  if (*mn < 1 || *mx < 10 * *mn) throw DomainError("fit: degrees must span at least one decade");
  const std::size_t n = degrees.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += std::log(static_cast<double>(degrees[i]));
    sy += values[i];
  }
  const double mx_log = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(static_cast<double>(degrees[i])) - mx_log;
    sxx += dx * dx;
    sxy += dx * (values[i] - my);
  }
  DeficiencyFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx_log;
  fit.degrees = degrees;
  fit.deficiencies = values;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] =
        values[i] - (fit.intercept + fit.slope * std::log(static_cast<double>(degrees[i])));
  }
  return fit;
}

DeficiencyFit deficiency_fit(const std::vector<int>& degrees, const QuadratureOptions& opts) {
  std::vector<double> def(degrees.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    def[i] = expected_nodal_length(degrees[i], opts).deficiency;
  }
  return fit_log_slope(degrees, def);
}

std::string prediction_csv_header() { return "ell,total,leading,deficiency,hc,hi,hf"; }

std::string prediction_csv_row(const NodalLengthPrediction& p) {
  std::ostringstream os;
  os.precision(17);
  os << p.degree << ',' << p.total << ',' << p.leading << ',' << p.deficiency << ',' << p.hc
     << ',' << p.hi << ',' << p.hf;
  return os.str();
}

}  // namespace nodalkit
