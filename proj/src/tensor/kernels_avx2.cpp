// AVX2 variants of the dense kernels. Compiled with -mavx2 only; the
// dispatcher hands these out after a runtime CPU check. Accumulation order
// matches the scalar reference exactly and FMA is deliberately not used, so
// results are bit-identical to the scalar backend.

#include "kgddi/tensor/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstring>

namespace kgddi::tensor::kernels {

namespace {

constexpr std::size_t kLanes = 4;  // doubles per 256-bit register

void matmul_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  const std::size_t n4 = n - n % kLanes;
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = arow[kk];
      const double* brow = b + kk * n;
      const __m256d va = _mm256_set1_pd(av);
      std::size_t j = 0;
      for (; j < n4; j += kLanes) {
        __m256d vc = _mm256_loadu_pd(crow + j);
        __m256d vb = _mm256_loadu_pd(brow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(va, vb));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
  const std::size_t n4 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n4; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  const std::size_t n4 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n4; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_avx2(const double* a, double s, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  const std::size_t n4 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n4; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  for (; i < n; ++i) out[i] = a[i] * s;
}

void axpy_avx2(double s, const double* x, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  const std::size_t n4 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n4; i += kLanes) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += s * x[i];
}

void relu_avx2(const double* a, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n4 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n4; i += kLanes) {
    __m256d va = _mm256_loadu_pd(a + i);
    // keep a[i] iff a[i] > 0, matching the scalar ternary (NaN and -0 map to +0)
    __m256d mask = _mm256_cmp_pd(va, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(va, mask));
  }
  for (; i < n; ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
}

const Backend kAvx2 = {
    "avx2", matmul_avx2, add_avx2, hadamard_avx2, scale_avx2, axpy_avx2, relu_avx2,
};

}  // namespace

const Backend* avx2_backend() {
#if defined(__GNUC__) || defined(__clang__)
  if (!__builtin_cpu_supports("avx2")) return nullptr;
#endif
  return &kAvx2;
}

}  // namespace kgddi::tensor::kernels

#endif  // __AVX2__
