#pragma once

#include <cstddef>
#include <cstdint>

#include "kgddi/error.hpp"

namespace kgddi::model {

// Architecture hyperparameters plus the ablation switches. Defaults are the
// tuned values the rest of the toolkit assumes when a config file leaves a
// key unset.
struct ModelConfig {
  std::uint32_t k = 2;        // hop budget of the enclosing subgraph
  std::size_t d = 32;         // hidden width per layer
  std::size_t L = 2;          // propagation layer count
  std::size_t B = 8;          // basis matrices per layer
  double gamma = 0.0;         // attention pruning threshold, keep iff score > gamma
  double dropout_p = 0.3;     // applied after each layer's ReLU, train mode only
  std::size_t num_ddi_relations = 0;   // decoder output count (label classes or types)
  std::size_t fingerprint_bits = 1024;

  bool use_kg = true;                   // off: propagation graph is DDI train edges only
  bool use_summarization = true;        // off: attention weights forced to 1
  bool use_subgraph_feature = true;     // off: pair representation drops the readout block
  bool use_fingerprint = true;          // off: pair representation drops fingerprints
  bool layer_independent_attention = true;  // off: mask recomputed from each layer's input

  // Input width of the first layer: embedding plus two distance one-hots.
  std::size_t d0() const { return d + 2 * (static_cast<std::size_t>(k) + 1); }

  // Width of one drug's layer-aggregated representation.
  std::size_t drug_width() const {
    return L * d + (use_fingerprint ? fingerprint_bits : 0);
  }

  // Width of the decoder input [h_u, h_v, h_Gsub?].
  std::size_t pair_width() const {
    return 2 * drug_width() + (use_subgraph_feature ? L * d : 0);
  }

  void validate(std::size_t num_relations) const {
    require(d >= 1, "config: hidden width must be at least 1");
    require(L >= 1, "config: at least one propagation layer required");
    require(B >= 1 && B <= num_relations, "config: basis count ", B,
            " outside [1, ", num_relations, "]");
    require(gamma >= -1.0 && gamma < 1.0, "config: gamma ", gamma, " outside [-1, 1)");
    require(dropout_p >= 0.0 && dropout_p < 1.0, "config: dropout ", dropout_p,
            " outside [0, 1)");
    require(num_ddi_relations >= 1, "config: decoder needs at least one output relation");
  }
};

}  // namespace kgddi::model
