#pragma once

#include <cstddef>

namespace neurocactus::kernels {

// Inner loops of the simulator. Matrices are row-major with row stride ld
// (ld >= n, ld a multiple of 4, padding columns zero). Vectors passed as x
// must hold ld entries with zero padding.

// out[i] = -leak * x[i] + gamma_theta(sum_j a[i*ld + j] * x[j]) + bu[i]
using RhsFn = void (*)(const double* a, std::size_t ld, std::size_t n, const double* x,
                       double leak, double theta, const double* bu, double* out);

// out[k] = min(max(decay[k] * a[k] + sign[k] * phi[k], lo[k]), hi[k]) for k < count.
// Non-edges carry lo = hi = 0 and therefore stay zero.
using HebbianFn = void (*)(std::size_t count, const double* a, const double* decay,
                           const double* sign, const double* phi, const double* lo,
                           const double* hi, double* out);

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  RhsFn rhs;
  HebbianFn hebbian;
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();
// Best table for this CPU. NEUROCACTUS_KERNELS=scalar forces the reference path.
const KernelTable& active_table();

constexpr std::size_t padded_stride(std::size_t n) { return (n + 3) / 4 * 4; }

void rhs_scalar(const double* a, std::size_t ld, std::size_t n, const double* x, double leak,
                double theta, const double* bu, double* out);
void hebbian_scalar(std::size_t count, const double* a, const double* decay, const double* sign,
                    const double* phi, const double* lo, const double* hi, double* out);
#if NEUROCACTUS_HAVE_AVX2
void rhs_avx2(const double* a, std::size_t ld, std::size_t n, const double* x, double leak,
              double theta, const double* bu, double* out);
void hebbian_avx2(std::size_t count, const double* a, const double* decay, const double* sign,
                  const double* phi, const double* lo, const double* hi, double* out);
#endif

}  // namespace neurocactus::kernels
