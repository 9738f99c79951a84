#include "watch/kernels.hpp"

namespace watch::kernels {

void project_scalar(const double* points, std::size_t n, std::size_t d,
                    const double* dirs, std::size_t k, double* out) noexcept {
  for (std::size_t s = 0; s < k; ++s) {
    const double* u = dirs + s * d;
    double* dst = out + s * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = points + i * d;
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        acc += x[c] * u[c];
      }
      dst[i] = acc;
    }
  }
}

}  // namespace watch::kernels
