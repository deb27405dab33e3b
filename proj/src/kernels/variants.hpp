#pragma once

#include "steerlab/kernels.hpp"

namespace steer::kernels {

#if defined(STEER_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(STEER_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

}  // namespace steer::kernels
