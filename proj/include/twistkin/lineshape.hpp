#pragma once

#include <vector>

#include "twistkin/spectra.hpp"

// Forward and inverse modeling of an internal line profile from fringe
// patterns taken at several orbital-index settings. The measured rate at
// scan position x is the single-line pattern smeared by the profile,
//
//   R_s(x) = sum_j w_j h F_s(x - e_j),
//
// with F_s the single-line scan of setting s and (e_j, w_j) the profile on
// a uniform grid of step h. Different settings weight the same profile with
// different fringe kernels, which is what makes the joint inversion
// well posed.

namespace twistkin {

struct LineProfile {
  enum class Kind { delta, lorentzian, gaussian, table };
  Kind kind = Kind::table;
  std::vector<double> grid;     // uniform offsets e_j
  std::vector<double> weights;  // non-negative, sum * h = 1
};

// Step of a uniform grid. Throws SchemaError when the spacing wobbles by
// more than 1e-9 relative.
double uniform_step(const std::vector<double>& grid);

// Non-negative weights on a uniform grid integrating to 1 within 1e-9.
void validate_profile(const LineProfile& profile);

LineProfile delta_profile(const std::vector<double>& grid, double center);
LineProfile lorentzian_profile(const std::vector<double>& grid, double center,
                               double gamma);
LineProfile gaussian_profile(const std::vector<double>& grid, double center,
                             double sigma);

struct MeasurementSetting {
  int m1 = 0;
  int m2 = 0;
};

// Shared optics for a batch of patterns: only the orbital indices differ
// between settings.
struct MeasurementSet {
  BesselMode b1;
  BesselMode b2;
  AtomBeam atom;
  PWAmplitudeModel model;
  ScanKind kind = ScanKind::detuning_rest;
  std::vector<MeasurementSetting> settings;
  ScanOptions scan;
};

// Predicted patterns on the x grid, one per setting.
std::vector<FringePattern> forward_pattern(const MeasurementSet& set,
                                           const LineProfile& profile,
                                           const std::vector<double>& x_grid);

// Rows stacked over (setting, x); entry (row, j) = h F_s(x_row - e_j).
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major
  std::vector<int> setting_of_row;
  std::vector<double> x_of_row;
};

DesignMatrix build_design_matrix(const MeasurementSet& set,
                                 const std::vector<double>& x_grid,
                                 const std::vector<double>& profile_grid);

// Measured pattern for one setting; sigma (optional, per point) weights the
// rows of the least-squares system.
struct Measurement {
  FringePattern pattern;
  std::vector<double> sigma;
};

struct ReconstructionConfig {
  std::vector<double> profile_grid;
  double lambda = -1.0;              // < 0: pick by L-curve
  bool nonnegativity = false;
  std::vector<double> lambda_grid;   // optional explicit L-curve abscissa
  int lcurve_points = 25;
};

struct LCurvePoint {
  double lambda = 0.0;
  double residual = 0.0;
  double seminorm = 0.0;
  double curvature = 0.0;
};

struct Reconstruction {
  LineProfile profile;   // raw least-squares weights (no renormalization)
  double lambda = 0.0;
  double residual = 0.0;
  int rank = 0;
  std::vector<LCurvePoint> lcurve;
};

// Tikhonov inversion with a second-difference seminorm. Throws IllPosed
// when the unregularized system is rank deficient, SchemaError on grid
// mismatches.
Reconstruction invert_lineshape(const MeasurementSet& set,
                                const std::vector<Measurement>& measured,
                                const ReconstructionConfig& cfg);

// Map a kick-direction pattern taken at nominal detuning delta0 onto the
// detuning axis: x(theta) = (K_perp(theta)^2 + Kz^2) / (2 M) with
// K_perp(theta) = sqrt(2 M delta0) sin(theta), values divided by the shell
// Jacobian so they compare directly with detuning-kind scans. Points with
// |cos(theta)| below cos_floor are dropped.
FringePattern angular_to_detuning(const FringePattern& pattern,
                                  const BesselMode& b1, const BesselMode& b2,
                                  const AtomBeam& atom, double delta0,
                                  double cos_floor = 1e-6);

}  // namespace twistkin
