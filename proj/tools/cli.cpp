#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nodalkit/density.hpp"
#include "nodalkit/errors.hpp"
#include "nodalkit/kac_rice.hpp"
#include "nodalkit/nodal_geometry.hpp"
#include "nodalkit/oracles.hpp"
#include "nodalkit/parallel.hpp"
#include "nodalkit/sampler.hpp"

namespace nodalkit::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;
constexpr int kSchema = 1;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json config_json(const ExperimentConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : describe(cfg)) j[k] = v;
  return j;
}

// Every artifact starts with the schema line, a timestamp line, and the
// configuration; only the timestamp line varies between identical runs.
void csv_preamble(std::ostream& out, const ExperimentConfig& cfg) {
  out << "# schema=" << kSchema << '\n';
  out << "# generated=" << utc_timestamp() << '\n';
  for (const auto& [k, v] : describe(cfg)) out << "# " << k << '=' << v << '\n';
}

json json_envelope(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = kSchema;
  j["generated"] = utc_timestamp();
  j["config"] = config_json(cfg);
  return j;
}

DensityOptions density_options(const ExperimentConfig& cfg) {
  DensityOptions d;
  d.far_c = cfg.far_c;
  d.psi_switch = cfg.psi_switch;
  return d;
}

QuadratureOptions quadrature_options(const ExperimentConfig& cfg) {
  QuadratureOptions q;
  q.eps0 = cfg.eps0;
  q.far_c = cfg.far_c;
  q.gauss_nodes = cfg.gauss_nodes;
  q.rel_tol = cfg.rel_tol;
  q.max_bisections = cfg.max_bisections;
  q.far_panel_width = cfg.far_panel_width;
  q.far_substitution = cfg.far_substitution;
  q.density = density_options(cfg);
  return q;
}

std::vector<double> psi_grid(const ExperimentConfig& cfg) {
  std::vector<double> g(cfg.psi_points);
  for (int i = 0; i < cfg.psi_points; ++i) {
    const double f = static_cast<double>(i) / (cfg.psi_points - 1);
    g[i] = cfg.psi_spacing == "log"
               ? cfg.psi_min * std::pow(cfg.psi_max / cfg.psi_min, f)
               : cfg.psi_min + (cfg.psi_max - cfg.psi_min) * f;
  }
  g.back() = cfg.psi_max;
  return g;
}

void run_density(const ExperimentConfig& cfg, std::ostream& out) {
  const int l = cfg.ell();
  const DensityOptions opts = density_options(cfg);
  const std::vector<double> grid = psi_grid(cfg);
  const DensityProfile exact = density_profile(l, grid, Regime::exact, opts);

  struct Row {
    double psi, exact, far, near, taylor, planar;
    const char* regime;
  };
  std::vector<Row> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double psi = grid[i];
    Row r{psi, exact.samples[i].value, NAN, k1_near_asymptotic(l, psi), NAN,
          l * planar_berry_density(0.5 * psi), "exact"};
    if (psi > cfg.far_c) {
      r.far = k1_far_asymptotic(l, psi, cfg.far_c);
      r.taylor = taylor_leading_term(l, psi, cfg.far_c).total();
      r.regime = regime_name(Regime::far);
    } else if (psi < cfg.eps0) {
      r.regime = regime_name(Regime::near);
    }
    rows.push_back(r);
  }

  if (cfg.format == "csv") {
    csv_preamble(out, cfg);
    out << "psi,exact,far,near,taylor,planar,regime\n";
    for (const Row& r : rows) {
      out << num(r.psi) << ',' << num(r.exact) << ',' << num(r.far) << ',' << num(r.near) << ','
          << num(r.taylor) << ',' << num(r.planar) << ',' << r.regime << '\n';
    }
  } else {
    json j = json_envelope(cfg);
    json arr = json::array();
    auto opt = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    for (const Row& r : rows) {
      arr.push_back({{"psi", r.psi}, {"exact", r.exact}, {"far", opt(r.far)},
                     {"near", r.near}, {"taylor", opt(r.taylor)}, {"planar", r.planar},
                     {"regime", r.regime}});
    }
    j["profile"] = std::move(arr);
    out << j.dump(2) << '\n';
  }
}

void run_length(const ExperimentConfig& cfg, std::ostream& out) {
  const QuadratureOptions q = quadrature_options(cfg);
  std::vector<NodalLengthPrediction> preds;
  for (int l : cfg.ells) preds.push_back(expected_nodal_length(l, q));

  json fit = nullptr;
  std::string fit_note;
  try {
    std::vector<double> def;
    for (const auto& p : preds) def.push_back(p.deficiency);
    const DeficiencyFit f = fit_log_slope(cfg.ells, def);
    fit = {{"slope", f.slope},
           {"intercept", f.intercept},
           {"residuals", f.residuals},
           {"reference_slope", -1.0 / (32.0 * std::numbers::sqrt2)}};
  } catch (const DomainError& e) {
    fit_note = e.what();
  }
  // Smallest tested degree from which every deficiency is negative.
  json ell0 = nullptr;
  for (std::size_t i = preds.size(); i-- > 0;) {
    if (preds[i].deficiency >= 0.0) break;
    ell0 = preds[i].degree;
  }

  if (cfg.format == "csv") {
    csv_preamble(out, cfg);
    if (fit.is_null()) {
      out << "# fit=unavailable (" << fit_note << ")\n";
    } else {
      out << "# fit_slope=" << num(fit["slope"].get<double>()) << '\n';
      out << "# fit_intercept=" << num(fit["intercept"].get<double>()) << '\n';
    }
    out << prediction_csv_header() << '\n';
    for (const auto& p : preds) out << prediction_csv_row(p) << '\n';
  } else {
    json j = json_envelope(cfg);
    json table = json::array();
    for (const auto& p : preds) {
      table.push_back({{"ell", p.degree},
                       {"total", p.total},
                       {"leading", p.leading},
                       {"deficiency", p.deficiency},
                       {"hc", p.hc},
                       {"hi", p.hi},
                       {"hf", p.hf},
                       {"panels", p.diagnostics.panels},
                       {"evaluations", p.diagnostics.evaluations},
                       {"excision_bound", p.diagnostics.excision_bound}});
    }
    j["table"] = std::move(table);
    if (fit.is_null()) {
      j["fit"] = nullptr;
      j["fit_note"] = fit_note;
    } else {
      j["fit"] = std::move(fit);
    }
    j["ell0"] = ell0;
    out << j.dump(2) << '\n';
  }
}

void run_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  const int l = cfg.ell();
  const EnsembleMode mode = parse_mode(cfg.mode);
  GridSpec grid = default_grid(mode, cfg.n_theta, cfg.n_phi);
  ExtractionOptions ext;
  ext.equator_exclusion = cfg.equator_exclusion;

  if (!cfg.dump_field.empty() || !cfg.dump_segments.empty()) {
    const FieldSample fs = synthesize_field(sample_coefficients(l, mode, cfg.seed, 0), grid);
    if (!cfg.dump_field.empty()) {
      std::ofstream f(cfg.dump_field, std::ios::binary);
      if (!f) throw UsageError("cannot write " + cfg.dump_field);
      write_field_binary(f, fs);
    }
    if (!cfg.dump_segments.empty()) {
      std::ofstream f(cfg.dump_segments);
      if (!f) throw UsageError("cannot write " + cfg.dump_segments);
      ExtractionOptions keep = ext;
      keep.keep_segments = true;
      write_segments_csv(f, extract_nodal_length(fs, keep));
    }
  }

  const NodalLengthResult res = monte_carlo_nodal_length(l, mode, cfg.replicates, grid, cfg.seed, ext);
  const double prediction = (mode == EnsembleMode::boundary_adapted)
                                ? expected_nodal_length(l, quadrature_options(cfg)).total
                                : berard_baseline(l);
  const double z = res.standard_error > 0.0 ? (res.mean - prediction) / res.standard_error : 0.0;

  if (cfg.format == "csv") {
    csv_preamble(out, cfg);
    out << "# mean=" << num(res.mean) << '\n';
    out << "# stderr=" << num(res.standard_error) << '\n';
    out << "# prediction=" << num(prediction) << '\n';
    out << "# z=" << num(z) << '\n';
    out << "replicate,length\n";
    for (std::size_t r = 0; r < res.values.size(); ++r) {
      out << r << ',' << num(res.values[r]) << '\n';
    }
  } else {
    json j = json_envelope(cfg);
    j["summary"] = {{"mean", res.mean},
                    {"stderr", res.standard_error},
                    {"prediction", prediction},
                    {"z", z}};
    j["values"] = res.values;
    out << j.dump(2) << '\n';
  }
}

bool run_verify(const ExperimentConfig& cfg, std::ostream& out) {
  std::vector<OracleReport> reports = run_oracle_suite(cfg.seed);
  const std::vector<OracleReport> inv = run_invariant_suite(cfg.seed);
  reports.insert(reports.end(), inv.begin(), inv.end());
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  if (cfg.format == "csv") {
    csv_preamble(out, cfg);
    write_reports_csv(out, reports);
  } else {
    json j = json_envelope(cfg);
    json arr = json::array();
    for (const auto& r : reports) {
      arr.push_back({{"quantity", r.quantity},
                     {"oracle", r.oracle},
                     {"value", r.value},
                     {"abs_dev", r.abs_dev},
                     {"rel_dev", r.rel_dev},
                     {"tolerance", r.tolerance},
                     {"tolerance_kind", r.relative ? "relative" : "absolute"},
                     {"pass", r.pass}});
    }
    j["reports"] = std::move(arr);
    j["all_pass"] = ok;
    out << j.dump(2) << '\n';
  }
  return ok;
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  set_thread_count(cfg.threads);
  std::ofstream file;
  std::ostream* sink = &out;
  if (cfg.output != "-") {
    file.open(cfg.output);
    if (!file) {
      err << "error: cannot open output file " << cfg.output << '\n';
      return kExitUsage;
    }
    sink = &file;
  }
  try {
    if (cfg.command == "density") {
      run_density(cfg, *sink);
    } else if (cfg.command == "length") {
      run_length(cfg, *sink);
    } else if (cfg.command == "simulate") {
      run_simulate(cfg, *sink);
    } else if (cfg.command == "verify") {
      if (!run_verify(cfg, *sink)) {
        err << "verification failed\n";
        return kExitFailure;
      }
    }
  } catch (const NumericalFailure& e) {
    json diag;
    diag["error"] = e.what();
    diag["diagnostics"] = json::parse(e.diagnostics(), nullptr, false);
    diag["config"] = config_json(cfg);
    err << diag.dump() << '\n';
    return kExitFailure;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateVarianceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero density and expected nodal length of boundary-adapted random spherical "
               "harmonics on the hemisphere"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> given;

  auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    given.emplace_back(key, sub->add_option("--" + key, values[key], help));
  };
  auto add_flag = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    given.emplace_back(key, sub->add_flag("--" + key, help));
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "file of key = value lines; flags override it");
    add(sub, "seed", "random seed");
    add(sub, "threads", "worker threads (default: NODALKIT_THREADS or all cores)");
    add(sub, "output", "output path, '-' for stdout");
    add(sub, "format", "csv or json");
  };

  CLI::App* density = app.add_subcommand("density", "zero-density profile along psi");
  common(density);
  add(density, "ell", "degree");
  add(density, "psi-min", "smallest psi");
  add(density, "psi-max", "largest psi (default just below pi * ell)");
  add(density, "psi-points", "number of samples");
  add(density, "psi-spacing", "log or linear");
  add(density, "eps0", "near-boundary region edge");
  add(density, "far-c", "far-field threshold C");
  add(density, "psi-switch", "series/direct switch");

  CLI::App* length = app.add_subcommand("length", "Kac-Rice expected nodal length and fit");
  common(length);
  add(length, "ell", "single degree");
  add(length, "ells", "comma-separated degrees");
  add(length, "eps0", "near-boundary region edge");
  add(length, "far-c", "far-field threshold C");
  add(length, "psi-switch", "series/direct switch");
  add(length, "gauss-nodes", "Gauss-Kronrod rule: 15, 31, 41, 51 or 61");
  add(length, "rel-tol", "panel tolerance");
  add(length, "max-bisections", "bisection depth cap per panel");
  add(length, "far-panel-width", "panel width in psi beyond C");
  add_flag(length, "far-substitution", "use the far-field expansion beyond C");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo nodal length campaign");
  common(simulate);
  add(simulate, "ell", "degree");
  add(simulate, "mode", "boundary or full");
  add(simulate, "replicates", "number of independent fields");
  add(simulate, "n-theta", "colatitude nodes");
  add(simulate, "n-phi", "longitude nodes");
  add(simulate, "equator-exclusion", "skip cells within this distance of the equator");
  add(simulate, "dump-field", "binary dump of replicate 0");
  add(simulate, "dump-segments", "CSV of replicate 0 nodal segments");

  CLI::App* verify = app.add_subcommand("verify", "oracle and invariant suites");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config_file(config_path)) apply_setting(cfg, k, v);
    }
    for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
    for (const auto& [key, opt] : given) {
      if (opt->count() == 0) continue;
      if (opt->get_type_size() == 0) {
        apply_setting(cfg, key, "true");
      } else {
        apply_setting(cfg, key, values[key]);
      }
    }
    validate(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(cfg, out, err);
}

}  // namespace nodalkit::cli
