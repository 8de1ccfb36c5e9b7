#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nodalkit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string canonical_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + key + ": '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("invalid integer for " + key + ": '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw UsageError(key + " out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("invalid boolean for " + key + ": '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_int(key, item));
  }
  if (out.empty()) throw UsageError(key + " needs at least one value");
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = canonical_key(trim(t.substr(0, eq)));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  if (key == "command") cfg.command = value;
  else if (key == "ell") cfg.ells = {to_int(key, value)};
  else if (key == "ells") cfg.ells = to_int_list(key, value);
  else if (key == "psi-min") cfg.psi_min = to_double(key, value);
  else if (key == "psi-max") cfg.psi_max = to_double(key, value);
  else if (key == "psi-points") cfg.psi_points = to_int(key, value);
  else if (key == "psi-spacing") cfg.psi_spacing = value;
  else if (key == "eps0") cfg.eps0 = to_double(key, value);
  else if (key == "far-c") cfg.far_c = to_double(key, value);
  else if (key == "psi-switch") cfg.psi_switch = to_double(key, value);
  else if (key == "gauss-nodes") cfg.gauss_nodes = to_int(key, value);
  else if (key == "rel-tol") cfg.rel_tol = to_double(key, value);
  else if (key == "max-bisections") cfg.max_bisections = to_int(key, value);
  else if (key == "far-panel-width") cfg.far_panel_width = to_double(key, value);
  else if (key == "far-substitution") cfg.far_substitution = to_bool(key, value);
  else if (key == "mode") cfg.mode = value;
  else if (key == "replicates") cfg.replicates = to_int(key, value);
  else if (key == "n-theta") cfg.n_theta = to_int(key, value);
  else if (key == "n-phi") cfg.n_phi = to_int(key, value);
  else if (key == "equator-exclusion") cfg.equator_exclusion = to_double(key, value);
  else if (key == "dump-field") cfg.dump_field = value;
  else if (key == "dump-segments") cfg.dump_segments = value;
  else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) throw UsageError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "threads") {
    const int t = to_int(key, value);
    if (t < 0) throw UsageError("threads must be nonnegative");
    cfg.threads = static_cast<unsigned>(t);
  } else if (key == "output") cfg.output = value;
  else if (key == "format") cfg.format = value;
  else throw UsageError("unknown setting: " + raw_key);
}

void validate(ExperimentConfig& cfg) {
  static const std::vector<std::string> commands{"density", "length", "simulate", "verify"};
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
    throw UsageError("unknown command: '" + cfg.command + "'");
  }
  if (cfg.format.empty()) cfg.format = (cfg.command == "length") ? "json" : "csv";
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("format must be csv or json");
  for (int l : cfg.ells) {
    if (l < 1) throw UsageError("degrees must be at least 1");
  }
  if (!(cfg.eps0 > 0.0 && cfg.far_c >= cfg.eps0)) {
    throw UsageError("region constants must satisfy 0 < eps0 <= far-c");
  }
  if (!(cfg.psi_switch > 0.0 && cfg.psi_switch <= 2.0)) {
    throw UsageError("psi-switch must lie in (0, 2]");
  }
  const double pi = std::numbers::pi;
  if (cfg.command == "density") {
    if (cfg.ells.size() != 1) throw UsageError("density takes a single degree");
    const double top = pi * cfg.ell();
    if (cfg.psi_max == 0.0) cfg.psi_max = top * (1.0 - 1e-9);
    if (!(cfg.psi_min > 0.0 && cfg.psi_max > cfg.psi_min && cfg.psi_max < top)) {
      throw UsageError("need 0 < psi-min < psi-max < pi * ell");
    }
    if (cfg.psi_points < 2) throw UsageError("psi-points must be at least 2");
    if (cfg.psi_spacing != "log" && cfg.psi_spacing != "linear") {
      throw UsageError("psi-spacing must be log or linear");
    }
  }
  if (cfg.command == "length") {
    static const int rules[] = {15, 31, 41, 51, 61};
    if (std::find(std::begin(rules), std::end(rules), cfg.gauss_nodes) == std::end(rules)) {
      throw UsageError("gauss-nodes must be one of 15, 31, 41, 51, 61");
    }
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1e-2)) throw UsageError("rel-tol must be in (0, 0.01)");
    if (cfg.max_bisections < 0 || cfg.max_bisections > 30) {
      throw UsageError("max-bisections must be in [0, 30]");
    }
    if (!(cfg.far_panel_width > 0.0)) throw UsageError("far-panel-width must be positive");
  }
  if (cfg.command == "simulate") {
    if (cfg.ells.size() != 1) throw UsageError("simulate takes a single degree");
    if (cfg.mode != "boundary" && cfg.mode != "full") throw UsageError("mode must be boundary or full");
    if (cfg.replicates < 30) throw UsageError("replicates must be at least 30");
    const int l = cfg.ell();
    const int theta_rule = (cfg.mode == "boundary") ? 10 * l : 20 * l;
    if (cfg.n_theta == 0) cfg.n_theta = std::max(theta_rule, 8);
    if (cfg.n_phi == 0) cfg.n_phi = std::max(20 * l, 8);
    if (cfg.n_theta < 2 || cfg.n_phi < 3) throw UsageError("grid too small");
    if (!(cfg.equator_exclusion >= 0.0)) throw UsageError("equator-exclusion must be >= 0");
  }
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg) {
  std::string ells;
  for (std::size_t i = 0; i < cfg.ells.size(); ++i) {
    ells += (i ? "," : "") + std::to_string(cfg.ells[i]);
  }
  std::vector<std::pair<std::string, std::string>> out{
      {"command", cfg.command}, {"ells", ells}, {"seed", std::to_string(cfg.seed)},
      {"eps0", fmt(cfg.eps0)}, {"far-c", fmt(cfg.far_c)}, {"psi-switch", fmt(cfg.psi_switch)},
      {"format", cfg.format}};
  if (cfg.command == "density") {
    out.insert(out.end(), {{"psi-min", fmt(cfg.psi_min)},
                           {"psi-max", fmt(cfg.psi_max)},
                           {"psi-points", std::to_string(cfg.psi_points)},
                           {"psi-spacing", cfg.psi_spacing}});
  } else if (cfg.command == "length") {
    out.insert(out.end(), {{"gauss-nodes", std::to_string(cfg.gauss_nodes)},
                           {"rel-tol", fmt(cfg.rel_tol)},
                           {"max-bisections", std::to_string(cfg.max_bisections)},
                           {"far-panel-width", fmt(cfg.far_panel_width)},
                           {"far-substitution", cfg.far_substitution ? "true" : "false"}});
  } else if (cfg.command == "simulate") {
    out.insert(out.end(), {{"mode", cfg.mode},
                           {"replicates", std::to_string(cfg.replicates)},
                           {"n-theta", std::to_string(cfg.n_theta)},
                           {"n-phi", std::to_string(cfg.n_phi)},
                           {"equator-exclusion", fmt(cfg.equator_exclusion)}});
  }
  return out;
}

}  // namespace nodalkit::cli
