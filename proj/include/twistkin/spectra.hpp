#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "twistkin/amplitude.hpp"
#include "twistkin/kernels.hpp"

// Observable patterns built from |J|^2: detuning scans, angular and
// azimuthal distributions, crossed-beam scans, kick sampling and the fringe
// census. All scans share one primitive: the energy shell at a given
// detuning intersects the transverse plane in a circle centered at -p_perp,
// and the pattern value is the arc integral of |J|^2 over the part of that
// circle inside the trimmed annulus.

namespace twistkin {

enum class PatternAxis { detuning, k_perp, theta, phi_k };

struct FringePattern {
  PatternAxis axis = PatternAxis::detuning;
  std::vector<double> grid;
  std::vector<double> values;
  double boundary_cutoff = 0.0;    // absolute trim applied to the annulus
  double excluded_fraction = 0.0;  // annulus measure removed by the trim
};

struct ScanOptions {
  double trim = -1.0;      // absolute; < 0 selects 1e-4 * (kappa1 + kappa2)
  double rel_tol = 1e-6;   // arc integral refinement target
  int min_panels = 64;
  int max_panels = 1 << 18;
  int threads = 1;
};

enum class ScanKind { detuning_rest, crossed_beam };

// Reusable scan state: validates inputs once, holds the batch kernel
// parameters, and evaluates the arc integral at arbitrary detuning.
class PatternEvaluator {
 public:
  PatternEvaluator(const BesselMode& b1, const BesselMode& b2,
                   const AtomBeam& atom, const PWAmplitudeModel& model,
                   ScanKind kind, const ScanOptions& opts = {});

  // Pattern value at one detuning (in the convention of the scan kind:
  // detuning_rest carries the full azimuthal integral, crossed_beam the
  // 1/(2 |K_perp + p_perp|) weighted curve integral).
  double operator()(double delta) const;

  FringePattern evaluate(const std::vector<double>& grid) const;

  // Same observable for an atom displaced in momentum, used by smearing.
  double at_offset(double delta, const Vec3& dp) const;

  // Integral of |J|^2 over the transfer azimuth at fixed |K_perp|; zero
  // outside the trimmed annulus.
  double azimuth_integral(double k_perp) const;

  double trim() const { return trim_; }
  double kmin() const { return kmin_; }
  double kmax() const { return kmax_; }
  double excluded_fraction() const { return excluded_; }
  const AtomBeam& atom() const { return atom_; }

 private:
  double circle_value(double delta, const Vec3& p) const;
  double arc_integral(double r, double px, double py, double base, double u_lo,
                      double u_hi, bool both_signs) const;
  double density_at_angle(double r, double pp, double phi_p, double u) const;

  BesselMode b1_, b2_;
  AtomBeam atom_;
  PWAmplitudeModel model_;
  ScanKind kind_;
  ScanOptions opts_;
  double trim_ = 0.0;
  double kmin_ = 0.0;
  double kmax_ = 0.0;
  double excluded_ = 0.0;
  double kz_sum_ = 0.0;
  bool indep_ = false;
  kern::DensityParams dp_{};
};

// Rate versus detuning for the atom's own momentum (the rest-frame recoil
// window when p = 0). Values are the azimuthal integral of |J|^2 over the
// energy shell; detunings outside the reachable window give 0.
FringePattern detuning_scan(const BesselMode& b1, const BesselMode& b2,
                            const AtomBeam& atom, const PWAmplitudeModel& model,
                            const std::vector<double>& deltas,
                            const ScanOptions& opts = {});

// Doppler-dominated scan for an atom crossing the beams: curve integral of
// |J|^2 with weight 1/(2 |K_perp + p_perp|) along the energy shell.
FringePattern crossed_beam_scan(const BesselMode& b1, const BesselMode& b2,
                                const AtomBeam& atom,
                                const PWAmplitudeModel& model,
                                const std::vector<double>& deltas,
                                const ScanOptions& opts = {});

// Kick-direction pattern at fixed detuning: theta on the shell of radius
// sqrt(2 M delta), K_perp(theta) = sqrt(2 M delta) sin(theta), value
// = sqrt(2 M delta) |cos(theta)| times the azimuthal integral of |J|^2.
// The hemisphere follows the sign of the longitudinal transfer; both
// hemispheres are kept when kz1 + kz2 = 0. Throws NoSolution when the shell
// radius is not positive.
FringePattern angular_distribution(const BesselMode& b1, const BesselMode& b2,
                                   const AtomBeam& atom,
                                   const PWAmplitudeModel& model, double delta,
                                   int n_theta, const ScanOptions& opts = {});

// |J|^2 versus transfer azimuth at fixed |K_perp|. Constant for
// azimuth-independent amplitude models.
FringePattern azimuthal_distribution(const BesselMode& b1,
                                     const BesselMode& b2,
                                     const AtomBeam& atom,
                                     const PWAmplitudeModel& model,
                                     double k_perp, int n_phi,
                                     const ScanOptions& opts = {});

struct KickEvent {
  TransferVector K;
  double delta = 0.0;
  double weight = 1.0;
};

struct SampleOptions {
  double trim = -1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t chunk = 4096;          // accepted events per RNG substream
  double warn_acceptance = 1e-4;
};

struct SampleStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate = 0.0;
  double bound = 0.0;
  bool low_acceptance = false;
};

// Rejection sampling of kicks with density proportional to |J|^2 over the
// trimmed annulus. K_perp^2 is drawn from the inverse-squared-area envelope
// (closed-form inverse CDF), which absorbs the rim divergences and leaves an
// exact bound on the bounded bracket factor for every model kind. Chunked
// substreams make the event list independent of the thread count.
std::vector<KickEvent> sample_kicks(const BesselMode& b1, const BesselMode& b2,
                                    const AtomBeam& atom,
                                    const PWAmplitudeModel& model,
                                    std::size_t n_events,
                                    const SampleOptions& opts = {},
                                    SampleStats* stats = nullptr);

struct Fringe {
  double position = 0.0;
  double height = 0.0;
  double contrast = 0.0;  // Michelson, against the deeper adjacent minimum
};

struct FringeCensus {
  std::vector<Fringe> fringes;       // interior maxima
  std::vector<double> minima_pos;
  std::vector<double> minima_val;
  int zero_count = 0;                // minima consistent with exact zeros
};

struct CensusOptions {
  double zero_frac = 1e-4;        // minimum-to-peak ratio counted as a zero
  int samples_per_oscillation = 8;
};

// Locate interior fringe maxima and minima of a sampled pattern. Throws
// Undersampled when the grid cannot resolve the oscillation count implied
// by the orbital indices.
FringeCensus fringe_census(const FringePattern& pattern, int m1, int m2,
                           const CensusOptions& opts = {});

// Largest Michelson contrast among interior fringes. Throws NoFringe when
// the census finds none.
double visibility(const FringePattern& pattern, int m1, int m2,
                  const CensusOptions& opts = {});

}  // namespace twistkin
