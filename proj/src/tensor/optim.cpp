#include "kgddi/tensor/optim.hpp"

#include <cmath>

#include "kgddi/error.hpp"

namespace kgddi::tensor {

Adam::Adam(AdamConfig cfg, std::vector<Tensor*> params)
    : cfg_(cfg), params_(std::move(params)) {
  require(cfg_.lr > 0.0, "adam: lr must be positive, got ", cfg_.lr);
  require(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0, "adam: beta1 out of range: ", cfg_.beta1);
  require(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0, "adam: beta2 out of range: ", cfg_.beta2);
  require(cfg_.eps > 0.0, "adam: eps must be positive");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (Tensor* p : params_) {
    require(p != nullptr, "adam: null parameter");
    m_.emplace_back(p->numel(), 0.0);
    v_.emplace_back(p->numel(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = *params_[pi];
    const bool has = p.has_grad();
    const std::vector<double>& gbuf = p.grad();
    std::vector<double>& m = m_[pi];
    std::vector<double>& v = v_[pi];
    for (std::size_t i = 0; i < p.numel(); ++i) {
      double g = (has ? gbuf[i] : 0.0) + cfg_.weight_decay * p.data()[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p.data()[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Adam::zero_grads() {
  for (Tensor* p : params_) p->zero_grad();
}

void Adam::restore(std::uint64_t t, std::vector<std::vector<double>> m,
                   std::vector<std::vector<double>> v) {
  require(m.size() == params_.size() && v.size() == params_.size(),
          "adam restore: moment count mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i)
    require(m[i].size() == params_[i]->numel() && v[i].size() == params_[i]->numel(),
            "adam restore: moment length mismatch at param ", i);
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

double clip_global_norm(const std::vector<Tensor*>& params, double max_norm) {
  require(max_norm > 0.0, "clip: max_norm must be positive, got ", max_norm);
  double sq = 0.0;
  for (Tensor* p : params) {
    if (!p->has_grad()) continue;
    for (double g : static_cast<const Tensor*>(p)->grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return 1.0;
  const double factor = max_norm / norm;
  for (Tensor* p : params) {
    if (!p->has_grad()) continue;
    for (double& g : p->grad()) g *= factor;
  }
  return factor;
}

}  // namespace kgddi::tensor
