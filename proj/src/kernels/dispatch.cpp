#include <cstdlib>
#include <cstring>

#include "neurocactus/kernels.hpp"

namespace neurocactus::kernels {

namespace {

bool cpu_has_avx2() {
#if NEUROCACTUS_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::scalar, "scalar", &rhs_scalar, &hebbian_scalar};
  return t;
}

const KernelTable* avx2_table() {
#if NEUROCACTUS_HAVE_AVX2
  static const KernelTable t{Isa::avx2, "avx2", &rhs_avx2, &hebbian_avx2};
  static const bool ok = cpu_has_avx2();
  return ok ? &t : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_table() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("NEUROCACTUS_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_table();
    if (const auto* t = avx2_table()) return t;
    return &scalar_table();
  }();
  return *chosen;
}

}  // namespace neurocactus::kernels
