// NEON variants of the dense kernels for aarch64. Same bit-identical contract
// as the AVX2 backend: scalar accumulation order, separate mul/add.

#include "kgddi/tensor/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstring>

namespace kgddi::tensor::kernels {

namespace {

constexpr std::size_t kLanes = 2;  // doubles per 128-bit register

void matmul_neon(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  const std::size_t n2 = n - n % kLanes;
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = arow[kk];
      const double* brow = b + kk * n;
      const float64x2_t va = vdupq_n_f64(av);
      std::size_t j = 0;
      for (; j < n2; j += kLanes) {
        float64x2_t vc = vld1q_f64(crow + j);
        vc = vaddq_f64(vc, vmulq_f64(va, vld1q_f64(brow + j)));
        vst1q_f64(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void add_neon(const double* a, const double* b, double* out, std::size_t n) {
  const std::size_t n2 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n2; i += kLanes) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void hadamard_neon(const double* a, const double* b, double* out, std::size_t n) {
  const std::size_t n2 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n2; i += kLanes) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_neon(const double* a, double s, double* out, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  const std::size_t n2 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n2; i += kLanes) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vs));
  for (; i < n; ++i) out[i] = a[i] * s;
}

void axpy_neon(double s, const double* x, double* y, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  const std::size_t n2 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n2; i += kLanes) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vaddq_f64(vy, vmulq_f64(vs, vld1q_f64(x + i)));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += s * x[i];
}

void relu_neon(const double* a, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const std::size_t n2 = n - n % kLanes;
  std::size_t i = 0;
  for (; i < n2; i += kLanes) {
    float64x2_t va = vld1q_f64(a + i);
    uint64x2_t mask = vcgtq_f64(va, zero);
    vst1q_f64(out + i,
              vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(va), mask)));
  }
  for (; i < n; ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
}

const Backend kNeon = {
    "neon", matmul_neon, add_neon, hadamard_neon, scale_neon, axpy_neon, relu_neon,
};

}  // namespace

const Backend* neon_backend() { return &kNeon; }

}  // namespace kgddi::tensor::kernels

#endif  // __aarch64__
