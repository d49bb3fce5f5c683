#pragma once

#include <complex>
#include <vector>

#include "twistkin/kinematics.hpp"

// Absorption amplitude for two Bessel modes. For a fixed transverse transfer
// the conical momenta admit exactly two azimuth assignments (configurations
// a and b); the observable amplitude is their coherent sum
//
//   J = exp(i (m1 - m2) phi_k) * (kappa1 kappa2 / (2 Area)) *
//       [ M_a exp(+i Phi) + M_b exp(-i Phi) ],   Phi = m1 delta1 + m2 delta2,
//
// where M_a, M_b are the plane-wave matrix elements evaluated at the two
// azimuth pairs. |J|^2 then carries the fringe factor cos^2(...) on top of
// the smooth envelope.

namespace twistkin {

using complexd = std::complex<double>;

struct PWAmplitudeModel {
  enum class Kind {
    constant,        // M(phi1, phi2) = m0
    relative_phase,  // M_a = m0 exp(+i phase_ab/2), M_b = m0 exp(-i phase_ab/2)
    user_table,      // periodic bilinear table over (phi1, phi2)
  };
  Kind kind = Kind::constant;
  complexd m0{1.0, 0.0};
  double phase_ab = 0.0;
  // user_table payload: values on the uniform periodic grid
  // phi1 = 2 pi i / n1, phi2 = 2 pi j / n2, stored row-major in i.
  int table_n1 = 0;
  int table_n2 = 0;
  std::vector<complexd> table;
};

void validate_model(const PWAmplitudeModel& model);

// True when the configuration amplitudes depend only on |K_perp| and not on
// the transfer azimuth, which lets the azimuthal integral collapse.
bool phi_independent(const PWAmplitudeModel& model);

// Plane-wave matrix element at explicit mode azimuths. For relative_phase
// the phi1 > phi2 half-space is configuration a.
complexd pw_amplitude(const PWAmplitudeModel& model, double phi1, double phi2,
                      bool config_a);

// The two configuration amplitudes for a given triangle and transfer azimuth.
struct ConfigAmplitudes {
  complexd m_a;
  complexd m_b;
};
ConfigAmplitudes config_amplitudes(const PWAmplitudeModel& model,
                                   const TriangleGeometry& g, double phi_k);

// Interference phase Phi = m1 delta1 + m2 delta2.
double fringe_function(int m1, int m2, const TriangleGeometry& g);

struct TwistedAmplitude {
  complexd value{0.0, 0.0};
  // Total phases of the two path contributions, wrapped to (-pi, pi].
  double phase_a = 0.0;
  double phase_b = 0.0;
  // Set when the triangle sits within eps_boundary of an annulus rim.
  bool boundary_flag = false;
};

// Exact two-path amplitude. Throws OutsideAnnulus outside the closed
// annulus and DegenerateBoundary when the triangle area vanishes (the
// envelope diverges there); within eps_boundary of a rim but at finite area
// the value is returned with boundary_flag set.
TwistedAmplitude twisted_amplitude(const BesselMode& b1, const BesselMode& b2,
                                   const TransferVector& K,
                                   const PWAmplitudeModel& model,
                                   double eps_boundary = -1.0);

struct DensityOptions {
  double eps_boundary = -1.0;   // < 0: default_eps_boundary(kappa1, kappa2)
  double energy_rel_tol = 1e-6; // gate width relative to the window scale
};

// |J|^2 at the transfer K, gated on energy conservation at detuning delta.
// Returns 0 outside the open annulus, inside the eps_boundary rim, or when
// the detuning required by K differs from delta by more than the gate.
double xsec_density(const BesselMode& b1, const BesselMode& b2,
                    const AtomBeam& atom, const PWAmplitudeModel& model,
                    const TransferVector& K, double delta,
                    const DensityOptions& opts = {});

}  // namespace twistkin
