#include "twistkin/kernels.hpp"

#include <atomic>

#include "kernels_impl.hpp"

namespace twistkin::kern {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Kind default_kind() {
  return (avx2_compiled() && cpu_has_avx2()) ? Kind::avx2 : Kind::scalar;
}

std::atomic<Kind>& active_slot() {
  static std::atomic<Kind> slot{default_kind()};
  return slot;
}

}  // namespace

bool avx2_compiled() { return TWISTKIN_HAVE_AVX2_TU != 0; }

bool kernel_supported(Kind kind) {
  switch (kind) {
    case Kind::scalar:
      return true;
    case Kind::avx2:
      return avx2_compiled() && cpu_has_avx2();
  }
  return false;
}

void select_kernel(Kind kind) {
  if (!kernel_supported(kind))
    throw PhysicsError("requested kernel is not available on this machine");
  active_slot().store(kind);
}

Kind active_kernel() { return active_slot().load(); }

void density_batch_scalar(const DensityParams& p, const double* kperp,
                          double* out, std::size_t n) {
  detail::density_batch_impl<vm::ScalarLane>(p, kperp, out, n);
}

void cos_phase_batch_scalar(const PhaseParams& p, const double* kperp,
                            double* out, std::size_t n) {
  detail::cos_phase_batch_impl<vm::ScalarLane>(p, kperp, out, n);
}

#if !TWISTKIN_HAVE_AVX2_TU
void density_batch_avx2(const DensityParams&, const double*, double*,
                        std::size_t) {
  throw PhysicsError("avx2 kernel not built into this binary");
}
void cos_phase_batch_avx2(const PhaseParams&, const double*, double*,
                          std::size_t) {
  throw PhysicsError("avx2 kernel not built into this binary");
}
#endif

void density_batch(const DensityParams& p, const double* kperp, double* out,
                   std::size_t n) {
  if (active_kernel() == Kind::avx2)
    density_batch_avx2(p, kperp, out, n);
  else
    density_batch_scalar(p, kperp, out, n);
}

void cos_phase_batch(const PhaseParams& p, const double* kperp, double* out,
                     std::size_t n) {
  if (active_kernel() == Kind::avx2)
    cos_phase_batch_avx2(p, kperp, out, n);
  else
    cos_phase_batch_scalar(p, kperp, out, n);
}

namespace {

// The two configuration amplitudes for models that do not look at the
// transfer azimuth.
ConfigAmplitudes fixed_amplitudes(const PWAmplitudeModel& model) {
  if (!phi_independent(model))
    throw PhysicsError("batch kernels require an azimuth-independent model");
  return {pw_amplitude(model, 0.0, 0.0, true),
          pw_amplitude(model, 0.0, 0.0, false)};
}

}  // namespace

DensityParams density_params(const BesselMode& b1, const BesselMode& b2,
                             const PWAmplitudeModel& model, double trim) {
  const ConfigAmplitudes m = fixed_amplitudes(model);
  const complexd w = m.m_a * std::conj(m.m_b);
  DensityParams p;
  p.kappa1 = b1.kappa;
  p.kappa2 = b2.kappa;
  p.m1 = static_cast<double>(b1.m);
  p.m2 = static_cast<double>(b2.m);
  p.a_coef = std::norm(m.m_a) + std::norm(m.m_b);
  p.b_coef = 2.0 * w.real();
  p.c_coef = -2.0 * w.imag();
  p.kmin = std::fabs(b1.kappa - b2.kappa) + trim;
  p.kmax = (b1.kappa + b2.kappa) - trim;
  return p;
}

PhaseParams phase_params(const BesselMode& b1, const BesselMode& b2,
                         const PWAmplitudeModel& model, double trim) {
  const ConfigAmplitudes m = fixed_amplitudes(model);
  PhaseParams p;
  p.kappa1 = b1.kappa;
  p.kappa2 = b2.kappa;
  p.m1 = static_cast<double>(b1.m);
  p.m2 = static_cast<double>(b2.m);
  // cos(Phi + offset) vanishes exactly where the interference factor does
  // when the two configuration amplitudes share a magnitude.
  p.phase_offset = 0.5 * (std::arg(m.m_a) - std::arg(m.m_b));
  p.kmin = std::fabs(b1.kappa - b2.kappa) + trim;
  p.kmax = (b1.kappa + b2.kappa) - trim;
  return p;
}

}  // namespace twistkin::kern
