#pragma once

#include <cstdint>
#include <vector>

#include "twistkin/spectra.hpp"

// Fringe smearing over the atomic momentum distribution. The beams are kept
// ideal; only the initial atom momentum is spread, entering the scan through
// the shifted energy-shell circle.

namespace twistkin {

enum class SmearMethod { automatic, quadrature, mc };

struct MomentumSpread {
  Vec3 sigma_p{0.0, 0.0, 0.0};  // Gaussian width per axis, eV
  int n_quad = 12;              // starting quadrature segments per axis
  int n_mc = 512;               // Monte Carlo samples
  std::uint64_t seed = 1;
  SmearMethod method = SmearMethod::automatic;
};

void validate_spread(const MomentumSpread& spread);

struct SmearedPattern {
  FringePattern pattern;
  std::vector<double> std_error;  // MC only; empty on the quadrature path
  std::size_t nodes = 0;          // momentum nodes averaged
  bool used_mc = false;
};

// Average of the scan over a Gaussian momentum distribution centered on
// atom.p. Axes with sigma 0 stay fixed; with every axis at zero the scan is
// returned unchanged, bitwise. `automatic` nests adaptive Gauss-Kronrod
// averages for up to two active axes and switches to common-random-number
// MC for three.
SmearedPattern smear_pattern(const BesselMode& b1, const BesselMode& b2,
                             const AtomBeam& atom,
                             const PWAmplitudeModel& model, ScanKind kind,
                             const std::vector<double>& grid,
                             const MomentumSpread& spread,
                             const ScanOptions& opts = {});

struct SpreadResult {
  double sigma = 0.0;       // width along the template's largest axis, eV
  double visibility = 0.0;  // re-evaluated at the returned width
};

// Bisection for the spread at which the smeared visibility crosses
// `threshold`. The template fixes the direction in sigma space (its sigma_p
// is rescaled so the largest component equals the returned sigma) and the
// quadrature settings; sigma_hi bounds the search. The bracket is narrowed
// below 1% relative width. Throws AlwaysVisible when even sigma_hi leaves
// the visibility above threshold, NeverVisible when the unsmeared pattern is
// already at or below it.
SpreadResult tolerable_spread(const BesselMode& b1, const BesselMode& b2,
                              const AtomBeam& atom,
                              const PWAmplitudeModel& model, ScanKind kind,
                              const std::vector<double>& grid,
                              double threshold, const MomentumSpread& tmpl,
                              double sigma_hi, const ScanOptions& opts = {},
                              const CensusOptions& census = {});

}  // namespace twistkin
