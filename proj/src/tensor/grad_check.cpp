#include "kgddi/tensor/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "kgddi/error.hpp"

namespace kgddi::tensor {

double gradient_check(const std::function<double(bool with_grad)>& run,
                      const std::vector<Tensor*>& params, double eps) {
  // Too small drowns in rounding noise, too large in truncation error.
  require(eps >= 1e-7 && eps <= 1e-3, "gradient_check: eps ", eps, " outside [1e-7, 1e-3]");
  for (Tensor* p : params) {
    require(p != nullptr && p->requires_grad, "gradient_check: params must track gradients");
    p->zero_grad();
  }
  run(true);
  // Snapshot before perturbation so the probe passes cannot disturb them.
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Tensor* p : params) analytic.push_back(p->grad());

  double max_err = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = *params[pi];
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + eps;
      const double fp = run(false);
      p.data()[i] = saved - eps;
      const double fm = run(false);
      p.data()[i] = saved;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = analytic[pi][i];
      const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace kgddi::tensor
