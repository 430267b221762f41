#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kgddi/model/config.hpp"
#include "kgddi/tensor/tensor.hpp"

namespace kgddi::model {

// Weights of one propagation layer. Layer 0 consumes the d0-wide input
// features, later layers consume d-wide states, so basis and w_self row
// counts differ by layer.
struct LayerParams {
  std::vector<tensor::Tensor> basis;  // B matrices, each in_width x d
  tensor::Tensor coeffs;              // num_relations x B mixing weights
  tensor::Tensor w_self;              // in_width x d

  // Attention recomputed from this layer's input; allocated only for layers
  // past the first when layer_independent_attention is off. The first layer
  // always scores from the input features via the shared matrices below.
  tensor::Tensor attn_wi;    // in_width x in_width
  tensor::Tensor attn_wj;    // in_width x in_width
  tensor::Tensor rel_attn;   // num_relations x in_width

  bool has_local_attention() const { return !attn_wi.empty(); }
};

// Every learnable tensor of the model. The named registry fixes a single
// canonical ordering used by the optimizer, the checkpoint writer, and
// gradient checks; init fills tensors in exactly that order.
struct ModelParams {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;  // relations of the propagation graph, DDI block included

  tensor::Tensor entity_embed;    // num_entities x d
  tensor::Tensor attn_wi;         // d0 x d0
  tensor::Tensor attn_wj;         // d0 x d0
  tensor::Tensor rel_attn_embed;  // num_relations x d0
  std::vector<LayerParams> layers;
  tensor::Tensor w_sub;           // d x d readout projection, shared across layers
  tensor::Tensor w_pred;          // pair_width x num_ddi_relations decoder

  // Stable (name, tensor) listing; same traversal order on every call.
  std::vector<std::pair<std::string, tensor::Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const tensor::Tensor*>> named_tensors() const;
  std::vector<tensor::Tensor*> tensors();

  // Shape consistency against a config; called once per forward entry point.
  void check_shapes(const ModelConfig& cfg) const;
};

// Uniform init in +-sqrt(6 / (fan_in + fan_out)) per matrix, filled in
// registry order from one seeded stream, so equal seeds give bitwise-equal
// parameters.
ModelParams init_params(const ModelConfig& cfg, std::size_t num_entities,
                        std::size_t num_relations, std::uint64_t seed);

}  // namespace kgddi::model
