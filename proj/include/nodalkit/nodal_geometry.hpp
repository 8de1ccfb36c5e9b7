#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nodalkit/sampler.hpp"

namespace nodalkit {

struct NodalSegment {
  double theta1, phi1, theta2, phi2;
};

struct NodalSegments {
  std::vector<NodalSegment> segments;  // empty unless requested
  double total_length = 0.0;
  bool equator_convention = false;     // true when 2 pi was added for the equator
  std::size_t segment_count = 0;
};

struct ExtractionOptions {
  // Cells whose far edge lies within this distance of the equator are skipped.
  // Boundary-adapted fields are contoured as T / cos(theta), whose zero set
  // reaches the equator, so the default keeps every cell.
  double equator_exclusion = 0.0;
  bool keep_segments = false;
  bool check_resolution = true;
};

// Grid rule: n_theta >= 10 l per quarter turn of colatitude, n_phi >= 20 l.
bool satisfies_resolution_rule(const GridSpec& grid, int degree);

// Marching squares on the (theta, phi) grid with linear edge interpolation;
// each segment is measured with ds^2 = dtheta^2 + sin^2(mean theta) dphi^2.
// Saddle cells are resolved by the exact field value at the cell centre when
// coefficients are attached, else by the mean of the corners.
NodalSegments extract_nodal_length(const FieldSample& field, const ExtractionOptions& opts = {});

void write_segments_csv(std::ostream& out, const NodalSegments& segs);

struct NodalLengthResult {
  int degree = 0;
  EnsembleMode mode = EnsembleMode::boundary_adapted;
  int replicates = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<double> values;  // per replicate, in replicate order
};

NodalLengthResult monte_carlo_nodal_length(int degree, EnsembleMode mode, int replicates,
                                           const GridSpec& grid, std::uint64_t seed,
                                           const ExtractionOptions& opts = {});

}  // namespace nodalkit
