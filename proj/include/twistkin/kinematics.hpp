#pragma once

#include <array>
#include <cmath>

#include "twistkin/errors.hpp"

// Geometry and energy bookkeeping for two-photon absorption of Bessel modes
// by an atom beam. Natural units throughout: energies, momenta and masses in
// eV, angles in radians, c = hbar = 1.

namespace twistkin {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Monochromatic Bessel mode: energy omega, longitudinal momentum kz, conical
// transverse momentum kappa, orbital index m. mass = 0 for photons.
struct BesselMode {
  double omega = 0.0;
  double kz = 0.0;
  double kappa = 0.0;
  int m = 0;
  double mass = 0.0;
};

// Incident atom: initial mass, mean momentum, internal excitation energy.
// relativistic selects the dispersion law used for energy balance.
struct AtomBeam {
  double mass_i = 0.0;
  Vec3 p{};
  double E_exc = 0.0;
  bool relativistic = false;
};

// Momentum transfer K = k1 + k2 in cylindrical components. phi_k normalized
// to [0, 2*pi).
struct TransferVector {
  double k_perp = 0.0;
  double phi_k = 0.0;
  double kz = 0.0;
};

// Triangle built from the two cone radii and the transverse transfer:
// sides kappa1, kappa2 close onto k_perp. delta1, delta2 are the internal
// angles adjacent to k_perp; area is the usual triangle area.
struct TriangleGeometry {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double k_perp = 0.0;
  double area = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool degenerate = false;
};

// The two azimuth assignments (phi1, phi2) compatible with a given transverse
// transfer. Configuration a has k1 rotated counterclockwise from K.
struct ConfigAzimuths {
  double phi1_a = 0.0;
  double phi2_a = 0.0;
  double phi1_b = 0.0;
  double phi2_b = 0.0;
};

struct DetuningWindow {
  double delta_min = 0.0;
  double delta_max = 0.0;
};

// Plane-wave cross-check: explicit wave vectors at chosen azimuths and the
// resulting energy mismatch for the given atom.
struct PlaneWaveReference {
  Vec3 k1{};
  Vec3 k2{};
  Vec3 K{};
  double mismatch = 0.0;
};

inline double wrap_two_pi(double phi) {
  double w = std::fmod(phi, 2.0 * M_PI);
  if (w < 0.0) w += 2.0 * M_PI;
  // fmod can land exactly on 2*pi after the fixup when phi is a tiny
  // negative number.
  if (w >= 2.0 * M_PI) w = 0.0;
  return w;
}

// Wrap into (-pi, pi].
inline double wrap_pi(double phi) {
  double w = wrap_two_pi(phi);
  if (w > M_PI) w -= 2.0 * M_PI;
  return w;
}

inline double default_eps_boundary(double kappa1, double kappa2) {
  return 1e-9 * (kappa1 + kappa2);
}

inline Vec3 transfer_to_vec(const TransferVector& K) {
  return {K.k_perp * std::cos(K.phi_k), K.k_perp * std::sin(K.phi_k), K.kz};
}

// Throws PhysicsError unless the mode satisfies omega^2 = kz^2 + kappa^2
// + mass^2 to relative tolerance rel_tol, with omega > 0 and kappa > 0.
void validate_mode(const BesselMode& mode, double rel_tol = 1e-12);

// Throws PhysicsError for nonpositive mass or negative excitation energy.
void validate_atom(const AtomBeam& atom);

// Solve the momentum triangle (kappa1, kappa2, k_perp).
// Throws OutsideAnnulus when k_perp lies outside the closed annulus
// [|kappa1-kappa2|, kappa1+kappa2] by more than eps_boundary. Points within
// eps_boundary of either rim are returned with degenerate = true.
// Pass eps_boundary < 0 to use default_eps_boundary(kappa1, kappa2).
TriangleGeometry triangle_geometry(double kappa1, double kappa2, double k_perp,
                                   double eps_boundary = -1.0);

// The two azimuth pairs compatible with the transfer direction phi_k:
//   a: phi1 = phi_k + delta1, phi2 = phi_k - delta2
//   b: phi1 = phi_k - delta1, phi2 = phi_k + delta2
// Results normalized to [0, 2*pi).
ConfigAzimuths config_azimuths(const TriangleGeometry& g, double phi_k);

// Detuning at which the transfer K satisfies energy conservation for this
// atom: nonrelativistic (K^2 + 2 p.K) / (2 M), or the exact difference of
// relativistic energies when atom.relativistic is set.
double detuning_from_transfer(const BesselMode& b1, const BesselMode& b2,
                              const AtomBeam& atom, const TransferVector& K);

// Polar angle of a kick with longitudinal component kz on the rest-frame
// energy shell of radius sqrt(2 M delta). Throws NoSolution when
// 2 M delta < kz^2.
double kick_polar_angle(double delta, double kz, double mass);

// Detuning interval reachable for an atom at rest:
//   [((kappa1-kappa2)^2 + Kz^2) / 2M, ((kappa1+kappa2)^2 + Kz^2) / 2M]
// with Kz = b1.kz + b2.kz.
DetuningWindow detuning_window_rest(const BesselMode& b1, const BesselMode& b2,
                                    const AtomBeam& atom);

// Doppler-broadened interval [-(kappa1+kappa2) beta, +(kappa1+kappa2) beta]
// for an atom crossing the beams with transverse speed beta.
DetuningWindow detuning_window_crossed(const BesselMode& b1,
                                       const BesselMode& b2,
                                       const AtomBeam& atom);

// Plane-wave kinematics at explicit azimuths, as an independent cross-check
// of the Bessel bookkeeping.
PlaneWaveReference pw_reference(const BesselMode& b1, const BesselMode& b2,
                                double phi1, double phi2, const AtomBeam& atom);

// Initial-state energy used in kinematic ratios: sqrt(M^2 + p^2) when
// relativistic, plain M otherwise.
double atom_energy(const AtomBeam& atom);

// Transverse speed of the atom, p_perp over energy.
double atom_beta_perp(const AtomBeam& atom);

}  // namespace twistkin
