#include "nodalkit/sampler.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "nodalkit/errors.hpp"
#include "nodalkit/parallel.hpp"
#include "nodalkit/special_functions.hpp"

namespace nodalkit {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_active(int degree, EnsembleMode mode, int m) {
  if (mode == EnsembleMode::full_sphere) return true;
  return ((degree - m) % 2 + 2) % 2 == 1;
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

const char* mode_name(EnsembleMode mode) {
  return mode == EnsembleMode::boundary_adapted ? "boundary" : "full";
}

EnsembleMode parse_mode(const std::string& name) {
  if (name == "boundary" || name == "boundary-adapted" || name == "hemisphere") {
    return EnsembleMode::boundary_adapted;
  }
  if (name == "full" || name == "full-sphere" || name == "sphere") return EnsembleMode::full_sphere;
  throw DomainError("unknown ensemble mode: " + name);
}

bool CoefficientSet::active(int m) const {
  const int am = std::abs(m);
  return am <= degree && is_active(degree, mode, am);
}

std::complex<double> CoefficientSet::coefficient(int m) const {
  if (std::abs(m) > degree) throw DomainError("coefficient order exceeds degree");
  if (m >= 0) return entries[m];
  return std::conj(entries[-m]);
}

int CoefficientSet::real_degrees_of_freedom() const {
  int dof = 0;
  for (int m = 0; m <= degree; ++m) {
    if (active(m)) dof += (m == 0) ? 1 : 2;
  }
  return dof;
}

double CoefficientSet::normalization() const {
  const double numer = (mode == EnsembleMode::boundary_adapted) ? 8.0 * kPi : 4.0 * kPi;
  return std::sqrt(numer / (2.0 * degree + 1.0));
}

CoefficientSet sample_coefficients(int degree, EnsembleMode mode, std::uint64_t seed,
                                   std::uint64_t replicate) {
  if (degree < 1) throw DomainError("degree must be at least 1");
  CoefficientSet cs;
  cs.degree = degree;
  cs.mode = mode;
  cs.seed = seed;
  cs.replicate = replicate;
  cs.entries.assign(degree + 1, {0.0, 0.0});
  std::mt19937_64 engine = replicate_engine(seed, replicate);
  std::normal_distribution<double> normal;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (int m = 0; m <= degree; ++m) {
    if (!is_active(degree, mode, m)) continue;
    if (m == 0) {
      cs.entries[0] = {normal(engine), 0.0};
    } else {
      const double u = normal(engine);
      const double v = normal(engine);
      cs.entries[m] = {u * inv_sqrt2, v * inv_sqrt2};
    }
  }
  return cs;
}

CoefficientSet rotate_azimuth(const CoefficientSet& coeffs, double shift) {
  CoefficientSet out = coeffs;
  for (int m = 1; m <= coeffs.degree; ++m) {
    out.entries[m] *= std::polar(1.0, -m * shift);
  }
  return out;
}

double GridSpec::theta(int i) const {
  if (i == n_theta - 1) return theta_max;
  return theta_max * i / (n_theta - 1);
}

double GridSpec::phi(int j) const { return 2.0 * kPi * j / n_phi; }

bool GridSpec::ends_on_equator() const { return theta_max == 0.5 * kPi; }

void GridSpec::validate() const {
  if (n_theta < 2 || n_phi < 3) throw DomainError("grid needs n_theta >= 2 and n_phi >= 3");
  if (!(theta_max > 0.0 && theta_max <= kPi)) throw DomainError("theta_max outside (0, pi]");
}

GridSpec default_grid(EnsembleMode mode, int n_theta, int n_phi) {
  GridSpec g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.theta_max = (mode == EnsembleMode::boundary_adapted) ? 0.5 * kPi : kPi;
  return g;
}

double FieldSample::max_abs_on_row(int i) const {
  double mx = 0.0;
  for (int j = 0; j < grid.n_phi; ++j) mx = std::max(mx, std::abs(at(i, j)));
  return mx;
}

std::complex<double> evaluate_field_complex(const CoefficientSet& coeffs, double theta,
                                            double phi) {
  const std::vector<double> row = associated_legendre_row(coeffs.degree, theta);
  std::complex<double> sum{0.0, 0.0};
  for (int m = -coeffs.degree; m <= coeffs.degree; ++m) {
    if (!coeffs.active(m)) continue;
    // Y_{l,-m} = conj(Y_lm) with Y_lm = row[m] e^{i m phi}.
    const std::complex<double> y = row[std::abs(m)] * std::polar(1.0, m * phi);
    sum += coeffs.coefficient(m) * y;
  }
  return coeffs.normalization() * sum;
}

double evaluate_field(const CoefficientSet& coeffs, double theta, double phi) {
  return evaluate_field_complex(coeffs, theta, phi).real();
}

GridSynthesizer::GridSynthesizer(int degree, EnsembleMode mode, const GridSpec& grid)
    : degree_(degree), mode_(mode), grid_(grid) {
  if (degree < 1) throw DomainError("degree must be at least 1");
  grid.validate();
  const int L = degree;
  rows_.assign(static_cast<std::size_t>(grid.n_theta) * (L + 1), 0.0);
  std::vector<double> row, deriv;
  for (int i = 0; i < grid.n_theta; ++i) {
    const double th = grid.theta(i);
    double c = std::cos(th), s = std::sin(th);
    if (th == 0.5 * kPi) {
      c = 0.0;
      s = 1.0;
    } else if (th == kPi) {
      c = -1.0;
      s = 0.0;
    }
    const bool equator_row = (i == grid.n_theta - 1) && grid.ends_on_equator();
    associated_legendre_rows_cs(L, c, s, row, equator_row ? &deriv : nullptr);
    std::copy(row.begin(), row.end(), rows_.begin() + static_cast<std::ptrdiff_t>(i) * (L + 1));
    if (equator_row && mode == EnsembleMode::boundary_adapted) equator_dtheta_ = deriv;
  }
  cos_table_.assign(static_cast<std::size_t>(L + 1) * grid.n_phi, 0.0);
  sin_table_.assign(cos_table_.size(), 0.0);
  for (int m = 0; m <= L; ++m) {
    for (int j = 0; j < grid.n_phi; ++j) {
      // Reduce m*j modulo n_phi so the argument stays exact.
      const long long k = (static_cast<long long>(m) * j) % grid.n_phi;
      const double ang = 2.0 * kPi * static_cast<double>(k) / grid.n_phi;
      cos_table_[static_cast<std::size_t>(m) * grid.n_phi + j] = std::cos(ang);
      sin_table_[static_cast<std::size_t>(m) * grid.n_phi + j] = std::sin(ang);
    }
  }
}

FieldSample GridSynthesizer::synthesize(std::shared_ptr<const CoefficientSet> coeffs) const {
  if (!coeffs || coeffs->degree != degree_ || coeffs->mode != mode_) {
    throw DomainError("coefficient set does not match the synthesizer");
  }
  const int L = degree_;
  const int np = grid_.n_phi;
  const double norm = coeffs->normalization();
  // Real form: a_0 Y_0 + 2 Re sum_{m>0} a_m Y_m
  //          = a_0 P_0 + 2 sum_{m>0} P_m (Re a_m cos(m phi) - Im a_m sin(m phi)).
  std::vector<double> re(L + 1, 0.0), im(L + 1, 0.0);
  for (int m = 0; m <= L; ++m) {
    if (!coeffs->active(m)) continue;
    const double w = (m == 0) ? norm : 2.0 * norm;
    re[m] = w * coeffs->entries[m].real();
    im[m] = w * coeffs->entries[m].imag();
  }
  auto accumulate_row = [&](const double* prow, double* out) {
    std::fill(out, out + np, 0.0);
    for (int m = 0; m <= L; ++m) {
      if (re[m] == 0.0 && im[m] == 0.0) continue;
      const double a = re[m] * prow[m];
      const double b = im[m] * prow[m];
      if (a == 0.0 && b == 0.0) continue;
      const double* ct = &cos_table_[static_cast<std::size_t>(m) * np];
      const double* st = &sin_table_[static_cast<std::size_t>(m) * np];
      for (int j = 0; j < np; ++j) out[j] += a * ct[j] - b * st[j];
    }
  };

  FieldSample fs;
  fs.grid = grid_;
  fs.degree = L;
  fs.mode = mode_;
  fs.seed = coeffs->seed;
  fs.replicate = coeffs->replicate;
  fs.values.assign(static_cast<std::size_t>(grid_.n_theta) * np, 0.0);
  for (int i = 0; i < grid_.n_theta; ++i) {
    accumulate_row(&rows_[static_cast<std::size_t>(i) * (L + 1)],
                   &fs.values[static_cast<std::size_t>(i) * np]);
  }
  if (!equator_dtheta_.empty()) {
    fs.normal_derivative.assign(np, 0.0);
    accumulate_row(equator_dtheta_.data(), fs.normal_derivative.data());
    for (double& v : fs.normal_derivative) v = -v;
  }
  fs.coefficients = std::move(coeffs);
  return fs;
}

FieldSample synthesize_field(const CoefficientSet& coeffs, const GridSpec& grid) {
  GridSynthesizer synth(coeffs.degree, coeffs.mode, grid);
  return synth.synthesize(std::make_shared<const CoefficientSet>(coeffs));
}

namespace {

// Real-form evaluation weights for a fixed point: T = sum_k w_k g_k where g
// runs over the real Gaussian variables in sampling order.
std::vector<double> point_weights(int degree, EnsembleMode mode, const SpherePoint& x) {
  const std::vector<double> row = associated_legendre_row(degree, x.theta);
  const double numer = (mode == EnsembleMode::boundary_adapted) ? 8.0 * kPi : 4.0 * kPi;
  const double norm = std::sqrt(numer / (2.0 * degree + 1.0));
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  std::vector<double> w;
  for (int m = 0; m <= degree; ++m) {
    if (!is_active(degree, mode, m)) continue;
    if (m == 0) {
      w.push_back(norm * row[0]);
    } else {
      // 2 Re((u + i v)/sqrt2 * P e^{i m phi}) = sqrt2 P (u cos - v sin)
      w.push_back(2.0 * inv_sqrt2 * norm * row[m] * std::cos(m * x.phi));
      w.push_back(-2.0 * inv_sqrt2 * norm * row[m] * std::sin(m * x.phi));
    }
  }
  return w;
}

std::vector<double> gaussian_vector(int degree, EnsembleMode mode, std::uint64_t seed,
                                    std::uint64_t replicate) {
  const CoefficientSet cs = sample_coefficients(degree, mode, seed, replicate);
  const double sqrt2 = std::numbers::sqrt2;
  std::vector<double> g;
  for (int m = 0; m <= degree; ++m) {
    if (!cs.active(m)) continue;
    if (m == 0) {
      g.push_back(cs.entries[0].real());
    } else {
      g.push_back(cs.entries[m].real() * sqrt2);
      g.push_back(cs.entries[m].imag() * sqrt2);
    }
  }
  return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<CovarianceEstimate> empirical_covariance(
    int degree, EnsembleMode mode, const std::vector<std::pair<SpherePoint, SpherePoint>>& pairs,
    int replicates, std::uint64_t seed) {
  if (replicates < 100) throw DomainError("empirical_covariance needs at least 100 replicates");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> weights;
  weights.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    weights.emplace_back(point_weights(degree, mode, x), point_weights(degree, mode, y));
  }
  std::vector<std::vector<double>> products(pairs.size(), std::vector<double>(replicates));
  parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    const std::vector<double> g = gaussian_vector(degree, mode, seed, r);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      products[k][r] = dot(weights[k].first, g) * dot(weights[k].second, g);
    }
  });
  std::vector<CovarianceEstimate> out(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    double mean = 0.0;
    for (double v : products[k]) mean += v;
    mean /= replicates;
    double var = 0.0;
    for (double v : products[k]) var += (v - mean) * (v - mean);
    var /= (replicates - 1);
    out[k].mean = mean;
    out[k].standard_error = std::sqrt(var / replicates);
    if (mode == EnsembleMode::boundary_adapted) {
      out[k].exact = covariance(degree, pairs[k].first, pairs[k].second);
    } else {
      out[k].exact = legendre_triple(degree, cos_distance(pairs[k].first, pairs[k].second)).p;
    }
  }
  return out;
}

std::vector<double> sample_point_values(int degree, EnsembleMode mode, const SpherePoint& x,
                                        int replicates, std::uint64_t seed) {
  const std::vector<double> w = point_weights(degree, mode, x);
  std::vector<double> out(replicates);
  parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    out[r] = dot(w, gaussian_vector(degree, mode, seed, r));
  });
  return out;
}

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw std::runtime_error("field dump truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_field_binary(std::ostream& out, const FieldSample& field) {
  out.write("NKFS", 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::int32_t>(out, field.degree);
  put_le<std::int32_t>(out, field.mode == EnsembleMode::boundary_adapted ? 0 : 1);
  put_le<std::int32_t>(out, field.grid.n_theta);
  put_le<std::int32_t>(out, field.grid.n_phi);
  put_le<double>(out, field.grid.theta_max);
  put_le<std::uint64_t>(out, field.seed);
  put_le<std::uint64_t>(out, field.replicate);
  put_le<std::uint32_t>(out, field.normal_derivative.empty() ? 0u : 1u);
  for (double v : field.values) put_le<double>(out, v);
  for (double v : field.normal_derivative) put_le<double>(out, v);
}

FieldSample read_field_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "NKFS", 4) != 0) throw std::runtime_error("not a field dump");
  if (get_le<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported field dump version");
  FieldSample fs;
  fs.degree = get_le<std::int32_t>(in);
  fs.mode = get_le<std::int32_t>(in) == 0 ? EnsembleMode::boundary_adapted
                                          : EnsembleMode::full_sphere;
  fs.grid.n_theta = get_le<std::int32_t>(in);
  fs.grid.n_phi = get_le<std::int32_t>(in);
  fs.grid.theta_max = get_le<double>(in);
  fs.grid.validate();
  fs.seed = get_le<std::uint64_t>(in);
  fs.replicate = get_le<std::uint64_t>(in);
  const bool has_nd = get_le<std::uint32_t>(in) != 0;
  fs.values.resize(static_cast<std::size_t>(fs.grid.n_theta) * fs.grid.n_phi);
  for (double& v : fs.values) v = get_le<double>(in);
  if (has_nd) {
    fs.normal_derivative.resize(fs.grid.n_phi);
    for (double& v : fs.normal_derivative) v = get_le<double>(in);
  }
  return fs;
}

}  // namespace nodalkit
