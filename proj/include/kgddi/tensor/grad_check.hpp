#pragma once

#include <functional>
#include <vector>

#include "kgddi/tensor/tensor.hpp"

namespace kgddi::tensor {

// Compares tape gradients against central finite differences.
//
// `run` rebuilds the forward pass from the current parameter values and
// returns the scalar loss; when with_grad is true it must also run backward
// and fold gradients into the params. Every element of every param is
// perturbed by +/- eps, so keep the inputs small.
//
// Returns max over elements of |analytic - numeric| / max(1, |analytic|, |numeric|).
double gradient_check(const std::function<double(bool with_grad)>& run,
                      const std::vector<Tensor*>& params, double eps = 1e-5);

}  // namespace kgddi::tensor
