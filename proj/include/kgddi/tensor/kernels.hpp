#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kgddi::tensor::kernels {

// Dense double-precision kernels behind the tensor ops. Every backend must
// produce bit-identical results to the scalar reference: vector variants keep
// the scalar accumulation order and use separate mul/add (no FMA contraction),
// so switching backends never changes a single bit of any downstream value.
struct Backend {
  const char* name;
  // c = a (m x k) * b (k x n); c is overwritten.
  void (*matmul)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  void (*scale)(const double* a, double s, double* out, std::size_t n);
  // y += s * x
  void (*axpy)(double s, const double* x, double* y, std::size_t n);
  // out[i] = a[i] > 0 ? a[i] : 0
  void (*relu)(const double* a, double* out, std::size_t n);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when not compiled in or CPU lacks AVX2
const Backend* neon_backend();  // nullptr off aarch64

// Runtime-selected backend. Honors KGDDI_KERNELS={scalar,avx2,neon} on first
// use; defaults to the widest supported vector backend.
const Backend& active();
void set_active(const std::string& name);  // throws on unknown/unsupported
std::vector<std::string> available();

}  // namespace kgddi::tensor::kernels
