#include "kernels_impl.hpp"

namespace ppgbp::kernels::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void minmax_scalar(const double* x, std::size_t n, double* lo, double* hi) {
  double l = x[0], h = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] < l) l = x[i];
    if (x[i] > h) h = x[i];
  }
  *lo = l;
  *hi = h;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{Isa::scalar, dot_scalar, axpy_scalar, minmax_scalar};
  return table;
}

}  // namespace ppgbp::kernels::detail
