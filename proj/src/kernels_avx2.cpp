#include "kernels_impl.hpp"
#include "twistkin/vmath_avx2.hpp"

namespace twistkin::kern {

void density_batch_avx2(const DensityParams& p, const double* kperp,
                        double* out, std::size_t n) {
  detail::density_batch_impl<vm::Avx2Lane>(p, kperp, out, n);
}

void cos_phase_batch_avx2(const PhaseParams& p, const double* kperp,
                          double* out, std::size_t n) {
  detail::cos_phase_batch_impl<vm::Avx2Lane>(p, kperp, out, n);
}

}  // namespace twistkin::kern
