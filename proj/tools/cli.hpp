#pragma once

#include <iosfwd>

#include "config.hpp"

namespace nodalkit::cli {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // numerical failure or failed verification
constexpr int kExitUsage = 2;

// Parses flags (and an optional --config file) and runs the subcommand.
// Results go to the configured output (stdout when "-"), messages to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs an already validated configuration.
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace nodalkit::cli
