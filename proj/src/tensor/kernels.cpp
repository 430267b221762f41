#include "kgddi/tensor/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kgddi/error.hpp"

namespace kgddi::tensor::kernels {

namespace {

// Scalar reference kernels. The i-k-j matmul order is the contract every
// vector backend reproduces: C[i,j] accumulates contributions in ascending k.
void matmul_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                   std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = arow[kk];
      const double* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_scalar(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void axpy_scalar(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void relu_scalar(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
}

const Backend kScalar = {
    "scalar", matmul_scalar, add_scalar, hadamard_scalar, scale_scalar, axpy_scalar, relu_scalar,
};

const Backend* pick_default() {
  if (const Backend* b = avx2_backend()) return b;
  if (const Backend* b = neon_backend()) return b;
  return &kScalar;
}

const Backend* lookup(const std::string& name) {
  if (name == "scalar") return &kScalar;
  if (name == "avx2") return avx2_backend();
  if (name == "neon") return neon_backend();
  return nullptr;
}

const Backend*& active_slot() {
  static const Backend* slot = [] {
    if (const char* env = std::getenv("KGDDI_KERNELS")) {
      if (const Backend* b = lookup(env)) return b;
    }
    return pick_default();
  }();
  return slot;
}

}  // namespace

const Backend& scalar_backend() { return kScalar; }

#if !defined(KGDDI_HAVE_AVX2)
const Backend* avx2_backend() { return nullptr; }
#endif
#if !defined(KGDDI_HAVE_NEON)
const Backend* neon_backend() { return nullptr; }
#endif

const Backend& active() { return *active_slot(); }

void set_active(const std::string& name) {
  const Backend* b = lookup(name);
  require(b != nullptr, "kernel backend '", name, "' is not available on this build/CPU");
  active_slot() = b;
}

std::vector<std::string> available() {
  std::vector<std::string> out = {"scalar"};
  if (avx2_backend()) out.push_back("avx2");
  if (neon_backend()) out.push_back("neon");
  return out;
}

}  // namespace kgddi::tensor::kernels
