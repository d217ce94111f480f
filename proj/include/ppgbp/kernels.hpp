#pragma once

// Inner-loop arithmetic kernels with a scalar reference implementation and
// SIMD variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked
// once at startup from CPU features; PPGBP_ISA=scalar|avx2|neon overrides it.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ppgbp::kernels {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// n >= 1
  void (*minmax)(const double* x, std::size_t n, double* lo, double* hi);
};

const KernelTable& scalar_table();

/// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* table_for(Isa isa);

/// Variants usable on this machine, scalar first.
std::vector<Isa> available();

const KernelTable& active();

/// Switches the process-wide variant; throws std::invalid_argument if unavailable.
void select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

/// Precondition: x non-empty.
inline std::pair<double, double> minmax(std::span<const double> x) {
  double lo = 0.0, hi = 0.0;
  active().minmax(x.data(), x.size(), &lo, &hi);
  return {lo, hi};
}

}  // namespace ppgbp::kernels
