#pragma once

#include "twistkin/amplitude.hpp"

// Brute-force cross-check of the closed-form amplitude. The conical modes
// are widened into Gaussian rings of width sigma and the resulting smooth
// two-dimensional integral is evaluated by quadrature; as sigma shrinks the
// result approaches the closed form with an O(sigma) defect. Nothing here
// shares code with the analytic path: plain libm, no batch kernels.

namespace twistkin {

struct RingRegularization {
  double sigma = 0.0;
  int n_radial = 32;
  int n_azimuthal = 512;        // starting grid, doubled until converged
  int max_azimuthal = 1 << 21;
  double rel_tol = 1e-8;
};

// Transverse Fourier profile of a widened conical mode:
//   (-i)^m exp(i m phi) sqrt(2 pi / kappa) g_sigma(k_mag - kappa)
// with g_sigma the unit-mass Gaussian.
complexd bessel_fourier_weight(double k_mag, double phi, double kappa, int m,
                               double sigma);

// Quadrature value of
//   integral d^2k1 g_sigma(|k1|-kappa1) g_sigma(|K-k1|-kappa2)
//            exp(i (m1 phi1 - m2 phi2)) M(phi1, phi2),
// whose sigma -> 0 limit is the closed-form amplitude. Gauss-Hermite in the
// radial offset, periodic trapezoid with adaptive doubling in the azimuth.
// Throws NonConvergent when doubling exhausts max_azimuthal.
complexd ring_quadrature_amplitude(const BesselMode& b1, const BesselMode& b2,
                                   const TransferVector& K,
                                   const PWAmplitudeModel& model,
                                   const RingRegularization& reg);

// Recover the two azimuth assignments by bisecting
// |K - kappa1 n(phi1)| - kappa2 on each side of phi_k, as an independent
// check of the closed-form triangle angles. Throws RootFailure when the
// brackets fail to straddle a sign change.
ConfigAzimuths root_find_configs(double kappa1, double kappa2, double k_perp,
                                 double phi_k, double tol = 1e-13);

}  // namespace twistkin
