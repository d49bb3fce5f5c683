#include "twistkin/kinematics.hpp"

#include <algorithm>
#include <sstream>

namespace twistkin {

namespace {

double clamped_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

// Detuning required for the transfer vector k to balance energy.
double detuning_from_vec(const AtomBeam& atom, const Vec3& k) {
  if (!atom.relativistic) {
    return (dot(k, k) + 2.0 * dot(atom.p, k)) / (2.0 * atom.mass_i);
  }
  const double ei = std::sqrt(atom.mass_i * atom.mass_i + dot(atom.p, atom.p));
  const double mf = atom.mass_i + atom.E_exc;
  const Vec3 pf = atom.p + k;
  const double ef = std::sqrt(mf * mf + dot(pf, pf));
  return ef - ei - atom.E_exc;
}

}  // namespace

void validate_mode(const BesselMode& mode, double rel_tol) {
  if (!(mode.omega > 0.0) || !std::isfinite(mode.omega))
    throw PhysicsError("mode energy must be positive and finite");
  if (!(mode.kappa > 0.0) || !std::isfinite(mode.kappa))
    throw PhysicsError("cone radius kappa must be positive and finite");
  if (!std::isfinite(mode.kz)) throw PhysicsError("mode kz must be finite");
  if (mode.mass < 0.0) throw PhysicsError("mode mass must be non-negative");
  const double lhs = mode.omega * mode.omega;
  const double rhs =
      mode.kz * mode.kz + mode.kappa * mode.kappa + mode.mass * mode.mass;
  if (std::fabs(lhs - rhs) > rel_tol * lhs) {
    std::ostringstream os;
    os << "dispersion violated: omega^2 = " << lhs << " but kz^2+kappa^2+m^2 = "
       << rhs;
    throw PhysicsError(os.str());
  }
}

void validate_atom(const AtomBeam& atom) {
  if (!(atom.mass_i > 0.0) || !std::isfinite(atom.mass_i))
    throw PhysicsError("atom mass must be positive and finite");
  if (!(atom.E_exc >= 0.0) || !std::isfinite(atom.E_exc))
    throw PhysicsError("excitation energy must be non-negative and finite");
  if (!std::isfinite(atom.p.x) || !std::isfinite(atom.p.y) ||
      !std::isfinite(atom.p.z))
    throw PhysicsError("atom momentum must be finite");
}

TriangleGeometry triangle_geometry(double kappa1, double kappa2, double k_perp,
                                   double eps_boundary) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0))
    throw PhysicsError("cone radii must be positive");
  if (!(k_perp >= 0.0) || !std::isfinite(k_perp))
    throw PhysicsError("k_perp must be non-negative and finite");
  const double eps =
      eps_boundary < 0.0 ? default_eps_boundary(kappa1, kappa2) : eps_boundary;
  const double lo = std::fabs(kappa1 - kappa2);
  const double hi = kappa1 + kappa2;
  if (k_perp < lo - eps || k_perp > hi + eps) {
    std::ostringstream os;
    os << "k_perp = " << k_perp << " outside annulus [" << lo << ", " << hi
       << "]";
    throw OutsideAnnulus(os.str());
  }

  TriangleGeometry g;
  g.kappa1 = kappa1;
  g.kappa2 = kappa2;
  g.k_perp = k_perp;
  g.degenerate = (k_perp <= lo + eps) || (k_perp >= hi - eps);

  const double K = std::clamp(k_perp, lo, hi);
  const double s = (hi * hi - K * K) * (K * K - lo * lo);
  g.area = 0.25 * std::sqrt(std::max(0.0, s));
  if (K > 0.0) {
    g.delta1 =
        clamped_acos((kappa1 * kappa1 + K * K - kappa2 * kappa2) / (2.0 * kappa1 * K));
    g.delta2 =
        clamped_acos((kappa2 * kappa2 + K * K - kappa1 * kappa1) / (2.0 * kappa2 * K));
  } else {
    // kappa1 = kappa2 with the transfer closing at zero: the cones point
    // back to back and both azimuth offsets approach a right angle.
    g.delta1 = 0.5 * M_PI;
    g.delta2 = 0.5 * M_PI;
  }
  return g;
}

ConfigAzimuths config_azimuths(const TriangleGeometry& g, double phi_k) {
  ConfigAzimuths c;
  c.phi1_a = wrap_two_pi(phi_k + g.delta1);
  c.phi2_a = wrap_two_pi(phi_k - g.delta2);
  c.phi1_b = wrap_two_pi(phi_k - g.delta1);
  c.phi2_b = wrap_two_pi(phi_k + g.delta2);
  return c;
}

double detuning_from_transfer(const BesselMode& b1, const BesselMode& b2,
                              const AtomBeam& atom, const TransferVector& K) {
  (void)b1;
  (void)b2;
  return detuning_from_vec(atom, transfer_to_vec(K));
}

double kick_polar_angle(double delta, double kz, double mass) {
  const double r2 = 2.0 * mass * delta;
  if (r2 <= 0.0 || r2 < kz * kz) {
    std::ostringstream os;
    os << "no kick direction: 2 M delta = " << r2 << ", kz^2 = " << kz * kz;
    throw NoSolution(os.str());
  }
  return clamped_acos(kz / std::sqrt(r2));
}

DetuningWindow detuning_window_rest(const BesselMode& b1, const BesselMode& b2,
                                    const AtomBeam& atom) {
  const double kzsum = b1.kz + b2.kz;
  const double lo = b1.kappa - b2.kappa;
  const double hi = b1.kappa + b2.kappa;
  const double m = atom.mass_i;
  return {(lo * lo + kzsum * kzsum) / (2.0 * m),
          (hi * hi + kzsum * kzsum) / (2.0 * m)};
}

DetuningWindow detuning_window_crossed(const BesselMode& b1,
                                       const BesselMode& b2,
                                       const AtomBeam& atom) {
  const double half = (b1.kappa + b2.kappa) * atom_beta_perp(atom);
  return {-half, half};
}

PlaneWaveReference pw_reference(const BesselMode& b1, const BesselMode& b2,
                                double phi1, double phi2,
                                const AtomBeam& atom) {
  PlaneWaveReference r;
  r.k1 = {b1.kappa * std::cos(phi1), b1.kappa * std::sin(phi1), b1.kz};
  r.k2 = {b2.kappa * std::cos(phi2), b2.kappa * std::sin(phi2), b2.kz};
  r.K = r.k1 + r.k2;
  r.mismatch =
      (b1.omega + b2.omega - atom.E_exc) - detuning_from_vec(atom, r.K);
  return r;
}

double atom_energy(const AtomBeam& atom) {
  if (!atom.relativistic) return atom.mass_i;
  return std::sqrt(atom.mass_i * atom.mass_i + dot(atom.p, atom.p));
}

double atom_beta_perp(const AtomBeam& atom) {
  return std::hypot(atom.p.x, atom.p.y) / atom_energy(atom);
}

}  // namespace twistkin
