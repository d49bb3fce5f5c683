#pragma once

#include <cstddef>

#include "twistkin/amplitude.hpp"

// Batch evaluation of the fringe density over arrays of transverse transfer
// magnitudes. One scalar reference kernel and one AVX2 kernel share the same
// straight-line arithmetic (see vmath.hpp), so their outputs are
// bit-identical and the active kernel is chosen at runtime.

namespace twistkin::kern {

// Parameters for |J|^2 with an azimuth-independent amplitude model:
//   |J|^2 = 4 (kappa1 kappa2)^2 / (16 A^2) *
//           (a + b cos(2 Phi) + c sin(2 Phi)),  Phi = m1 delta1 + m2 delta2.
// Inputs outside the open interval (kmin, kmax) evaluate to 0.
struct DensityParams {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double a_coef = 0.0;
  double b_coef = 0.0;
  double c_coef = 0.0;
  double kmin = 0.0;
  double kmax = 0.0;
};

// Parameters for the bare interference factor cos(Phi + phase_offset).
struct PhaseParams {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double phase_offset = 0.0;
  double kmin = 0.0;
  double kmax = 0.0;
};

enum class Kind { scalar, avx2 };

// True when this binary carries the AVX2 translation unit at all.
bool avx2_compiled();
// True when the kernel can actually run on this machine.
bool kernel_supported(Kind kind);
// Override the dispatch choice. Throws PhysicsError for unsupported kinds.
void select_kernel(Kind kind);
Kind active_kernel();

// Dispatched entry points.
void density_batch(const DensityParams& p, const double* kperp, double* out,
                   std::size_t n);
void cos_phase_batch(const PhaseParams& p, const double* kperp, double* out,
                     std::size_t n);

// Direct entry points, kept visible for the equivalence tests.
void density_batch_scalar(const DensityParams& p, const double* kperp,
                          double* out, std::size_t n);
void cos_phase_batch_scalar(const PhaseParams& p, const double* kperp,
                            double* out, std::size_t n);
void density_batch_avx2(const DensityParams& p, const double* kperp,
                        double* out, std::size_t n);
void cos_phase_batch_avx2(const PhaseParams& p, const double* kperp,
                          double* out, std::size_t n);

// Assemble DensityParams from a mode pair and an azimuth-independent model.
// kmin/kmax are the annulus bounds pulled in by trim on each side.
// Throws PhysicsError when the model depends on the transfer azimuth.
DensityParams density_params(const BesselMode& b1, const BesselMode& b2,
                             const PWAmplitudeModel& model, double trim);

PhaseParams phase_params(const BesselMode& b1, const BesselMode& b2,
                         const PWAmplitudeModel& model, double trim);

}  // namespace twistkin::kern
