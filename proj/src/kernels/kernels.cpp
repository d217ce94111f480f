#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kernels_impl.hpp"

namespace ppgbp::kernels {

namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PPGBP_WITH_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(PPGBP_WITH_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("PPGBP_ISA")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == to_string(isa))
        if (const KernelTable* t = table_for(isa)) return t;
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (const KernelTable* t = table_for(isa)) return t;
  return &detail::scalar();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return detail::scalar(); }

const KernelTable* table_for(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &detail::scalar();
    case Isa::avx2:
#if defined(PPGBP_WITH_AVX2)
      return &detail::avx2();
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(PPGBP_WITH_NEON)
      return &detail::neon();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (table_for(isa)) out.push_back(isa);
  return out;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (!t) throw std::invalid_argument(std::string("kernel variant not available: ") + to_string(isa));
  current().store(t, std::memory_order_release);
}

}  // namespace ppgbp::kernels
