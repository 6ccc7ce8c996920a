#include <algorithm>
#include <cmath>

#include "neurocactus/kernels.hpp"

namespace neurocactus::kernels {

void rhs_scalar(const double* a, std::size_t ld, std::size_t n, const double* x, double leak,
                double theta, const double* bu, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a + i * ld;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    const double g = std::abs(s) > theta ? s : 0.0;
    out[i] = -leak * x[i] + g + bu[i];
  }
}

void hebbian_scalar(std::size_t count, const double* a, const double* decay, const double* sign,
                    const double* phi, const double* lo, const double* hi, double* out) {
  for (std::size_t k = 0; k < count; ++k) {
    const double v = decay[k] * a[k] + sign[k] * phi[k];
    out[k] = std::min(std::max(v, lo[k]), hi[k]);
  }
}

}  // namespace neurocactus::kernels
