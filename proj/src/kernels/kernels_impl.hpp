#pragma once

#include "ppgbp/kernels.hpp"

namespace ppgbp::kernels::detail {

const KernelTable& scalar();
#if defined(PPGBP_WITH_AVX2)
const KernelTable& avx2();
#endif
#if defined(PPGBP_WITH_NEON)
const KernelTable& neon();
#endif

}  // namespace ppgbp::kernels::detail
