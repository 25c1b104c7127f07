#pragma once

#include "protectsim/simd/kernels.hpp"

namespace protectsim::simd::detail {

const KernelTable& scalar_table();
#if defined(PROTECTSIM_BUILD_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace protectsim::simd::detail
