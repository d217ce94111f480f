#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace ppgbp::kernels::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void minmax_neon(const double* x, std::size_t n, double* lo, double* hi) {
  std::size_t i = 0;
  double l = x[0], h = x[0];
  if (n >= 2) {
    float64x2_t vl = vld1q_f64(x);
    float64x2_t vh = vl;
    for (i = 2; i + 2 <= n; i += 2) {
      const float64x2_t v = vld1q_f64(x + i);
      vl = vminq_f64(vl, v);
      vh = vmaxq_f64(vh, v);
    }
    l = vminvq_f64(vl);
    h = vmaxvq_f64(vh);
  }
  for (; i < n; ++i) {
    if (x[i] < l) l = x[i];
    if (x[i] > h) h = x[i];
  }
  *lo = l;
  *hi = h;
}

}  // namespace

const KernelTable& neon() {
  static const KernelTable table{Isa::neon, dot_neon, axpy_neon, minmax_neon};
  return table;
}

}  // namespace ppgbp::kernels::detail
