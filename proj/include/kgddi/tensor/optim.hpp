#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgddi/tensor/tensor.hpp"

namespace kgddi::tensor {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // coupled L2, added to the gradient before the moments
};

// Adam over a fixed, ordered list of parameter tensors. Moment buffers are
// positional, so the registration order must stay stable across checkpoint
// save and load.
class Adam {
 public:
  Adam(AdamConfig cfg, std::vector<Tensor*> params);

  // One update over all registered params. A parameter with no grad buffer
  // counts as zero gradient; weight decay still applies to it.
  void step();

  void zero_grads();

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t step_count() const { return t_; }
  std::size_t param_count() const { return params_.size(); }

  // Checkpoint access. Moment vectors are element-aligned with the parameter.
  const std::vector<double>& first_moment(std::size_t i) const { return m_[i]; }
  const std::vector<double>& second_moment(std::size_t i) const { return v_[i]; }
  void restore(std::uint64_t t, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  AdamConfig cfg_;
  std::vector<Tensor*> params_;
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t t_ = 0;
};

// Scales every grad buffer so the global L2 norm (over all params jointly)
// does not exceed max_norm. Returns the factor applied, 1.0 when under the
// threshold. Params without a grad buffer contribute zero.
double clip_global_norm(const std::vector<Tensor*>& params, double max_norm);

}  // namespace kgddi::tensor
