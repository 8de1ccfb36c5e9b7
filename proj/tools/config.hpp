#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nodalkit::cli {

// Invalid configuration; the front end maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string command;
  std::vector<int> ells{100};
  // density
  double psi_min = 0.01;
  double psi_max = 0.0;  // 0 means pi * l minus a small margin
  int psi_points = 200;
  std::string psi_spacing = "log";
  // region constants
  double eps0 = 0.5;
  double far_c = 10.0;
  double psi_switch = 0.5;
  // length
  int gauss_nodes = 31;
  double rel_tol = 1e-10;
  int max_bisections = 8;
  double far_panel_width = 1.5707963267948966;
  bool far_substitution = false;
  // simulate
  std::string mode = "boundary";
  int replicates = 100;
  int n_theta = 0;  // 0 means the resolution-rule minimum
  int n_phi = 0;
  double equator_exclusion = 0.0;
  std::string dump_field;
  std::string dump_segments;
  // common
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  std::string output = "-";
  std::string format;  // empty means the command default

  int ell() const { return ells.front(); }
};

// Reads `key = value` lines. Blank lines and lines starting with '#' are
// ignored. Keys may use '-' or '_'.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies one key; throws UsageError on unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Checks every field against the preconditions of the command.
void validate(ExperimentConfig& cfg);

// Canonical key = value listing, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg);

}  // namespace nodalkit::cli
