#include <arm_neon.h>

#include <cmath>

#include "watch/kernels.hpp"

namespace watch::kernels {
namespace {

inline double tail(const double* x, const double* u, std::size_t from,
                   std::size_t d, double acc) noexcept {
  for (std::size_t c = from; c < d; ++c) {
    acc = std::fma(x[c], u[c], acc);
  }
  return acc;
}

}  // namespace

void project_neon(const double* points, std::size_t n, std::size_t d,
                  const double* dirs, std::size_t k, double* out) noexcept {
  const std::size_t body = d - d % 2;
  std::size_t s = 0;
  for (; s + 4 <= k; s += 4) {
    const double* u0 = dirs + (s + 0) * d;
    const double* u1 = dirs + (s + 1) * d;
    const double* u2 = dirs + (s + 2) * d;
    const double* u3 = dirs + (s + 3) * d;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = points + i * d;
      float64x2_t a0 = vdupq_n_f64(0.0);
      float64x2_t a1 = vdupq_n_f64(0.0);
      float64x2_t a2 = vdupq_n_f64(0.0);
      float64x2_t a3 = vdupq_n_f64(0.0);
      for (std::size_t c = 0; c < body; c += 2) {
        const float64x2_t xv = vld1q_f64(x + c);
        a0 = vfmaq_f64(a0, xv, vld1q_f64(u0 + c));
        a1 = vfmaq_f64(a1, xv, vld1q_f64(u1 + c));
        a2 = vfmaq_f64(a2, xv, vld1q_f64(u2 + c));
        a3 = vfmaq_f64(a3, xv, vld1q_f64(u3 + c));
      }
      out[(s + 0) * n + i] = tail(x, u0, body, d, vaddvq_f64(a0));
      out[(s + 1) * n + i] = tail(x, u1, body, d, vaddvq_f64(a1));
      out[(s + 2) * n + i] = tail(x, u2, body, d, vaddvq_f64(a2));
      out[(s + 3) * n + i] = tail(x, u3, body, d, vaddvq_f64(a3));
    }
  }
  for (; s < k; ++s) {
    const double* u = dirs + s * d;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = points + i * d;
      float64x2_t a = vdupq_n_f64(0.0);
      for (std::size_t c = 0; c < body; c += 2) {
        a = vfmaq_f64(a, vld1q_f64(x + c), vld1q_f64(u + c));
      }
      out[s * n + i] = tail(x, u, body, d, vaddvq_f64(a));
    }
  }
}

}  // namespace watch::kernels
