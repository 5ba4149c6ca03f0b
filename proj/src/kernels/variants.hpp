#pragma once

#include "ransomnet/kernels.hpp"

namespace ransomnet::kernels::detail {

#if defined(RANSOMNET_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(RANSOMNET_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace ransomnet::kernels::detail
