// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "watch/kernels.hpp"

namespace watch::kernels {
namespace {

inline double hsum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline double tail(const double* x, const double* u, std::size_t from,
                   std::size_t d, double acc) noexcept {
  for (std::size_t c = from; c < d; ++c) {
    acc = std::fma(x[c], u[c], acc);
  }
  return acc;
}

}  // namespace

void project_avx2(const double* points, std::size_t n, std::size_t d,
                  const double* dirs, std::size_t k, double* out) noexcept {
  const std::size_t body = d - d % 4;
  std::size_t s = 0;
  // Four directions per pass share each load of the point row.
  for (; s + 4 <= k; s += 4) {
    const double* u0 = dirs + (s + 0) * d;
    const double* u1 = dirs + (s + 1) * d;
    const double* u2 = dirs + (s + 2) * d;
    const double* u3 = dirs + (s + 3) * d;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = points + i * d;
      __m256d a0 = _mm256_setzero_pd();
      __m256d a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd();
      __m256d a3 = _mm256_setzero_pd();
      for (std::size_t c = 0; c < body; c += 4) {
        const __m256d xv = _mm256_loadu_pd(x + c);
        a0 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(u0 + c), a0);
        a1 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(u1 + c), a1);
        a2 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(u2 + c), a2);
        a3 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(u3 + c), a3);
      }
      out[(s + 0) * n + i] = tail(x, u0, body, d, hsum(a0));
      out[(s + 1) * n + i] = tail(x, u1, body, d, hsum(a1));
      out[(s + 2) * n + i] = tail(x, u2, body, d, hsum(a2));
      out[(s + 3) * n + i] = tail(x, u3, body, d, hsum(a3));
    }
  }
  for (; s < k; ++s) {
    const double* u = dirs + s * d;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = points + i * d;
      __m256d a = _mm256_setzero_pd();
      for (std::size_t c = 0; c < body; c += 4) {
        a = _mm256_fmadd_pd(_mm256_loadu_pd(x + c), _mm256_loadu_pd(u + c), a);
      }
      out[s * n + i] = tail(x, u, body, d, hsum(a));
    }
  }
}

}  // namespace watch::kernels
