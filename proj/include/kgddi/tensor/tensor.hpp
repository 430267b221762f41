#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kgddi/error.hpp"

namespace kgddi::tensor {

// Dense row-major matrix of 64-bit floats. Vectors are 1xN rows.
// Carries an optional same-shape gradient accumulator used by the tape
// and the optimizer; grad storage is allocated on first accumulation.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, "tensor: data length ", data_.size(),
            " does not match shape ", shape_str());
  }

  static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor(rows, cols); }
  static Tensor full(std::size_t rows, std::size_t cols, double v) {
    Tensor t(rows, cols);
    for (auto& x : t.data_) x = v;
    return t;
  }
  static Tensor row(std::vector<double> values) {
    std::size_t n = values.size();
    return Tensor(1, n, std::move(values));
  }
  static Tensor scalar(double v) { return Tensor(1, 1, {v}); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  double item() const {
    require(numel() == 1, "tensor: item() on non-scalar shape ", shape_str());
    return data_[0];
  }

  bool requires_grad = false;

  bool has_grad() const { return !grad_.empty(); }
  std::vector<double>& grad() {
    ensure_grad();
    return grad_;
  }
  const std::vector<double>& grad() const { return grad_; }
  void ensure_grad() {
    if (grad_.empty()) grad_.assign(data_.size(), 0.0);
  }
  void zero_grad() {
    if (!grad_.empty()) grad_.assign(data_.size(), 0.0);
  }
  void drop_grad() { grad_.clear(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
  std::vector<double> grad_;
};

inline Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
  return out;
}

inline bool all_finite(const Tensor& t) {
  for (double v : t.values())
    if (!std::isfinite(v)) return false;
  return true;
}

inline void check_finite(const Tensor& t, const char* where) {
  if (!all_finite(t)) fail("non-finite value produced by ", where, " (shape ", t.shape_str(), ")");
}

}  // namespace kgddi::tensor
