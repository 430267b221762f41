#pragma once

#include <cstddef>

#include "kgddi/tensor/tape.hpp"
#include "kgddi/tensor/tensor.hpp"

namespace kgddi::train {

// Multi-class loss for one pair: log-sum-exp of the logits minus the logit of
// the true label. The max is subtracted inside the reduction, so huge logits
// stay finite. Logits must be a single row; label must be < the column count.
double cross_entropy(const tensor::Tensor& logits, std::size_t label);

// Multi-label loss for one (pair, relation) edge together with its corrupted
// counterpart: -log sigmoid(pos[r]) - log(1 - sigmoid(neg[r])), evaluated as
// softplus(-pos[r]) + softplus(neg[r]) so neither side can overflow.
double bce_with_negative(const tensor::Tensor& pos_logits, const tensor::Tensor& neg_logits,
                         std::size_t label);

// Tape counterparts producing a 1x1 differentiable node. Values match the
// plain versions exactly when evaluated on the same logits.
tensor::Var cross_entropy_on_tape(tensor::Tape& tape, tensor::Var logits, std::size_t label);
tensor::Var bce_on_tape(tensor::Tape& tape, tensor::Var pos_logits, tensor::Var neg_logits,
                        std::size_t label);

}  // namespace kgddi::train
