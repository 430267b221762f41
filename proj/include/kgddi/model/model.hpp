#pragma once

#include <random>
#include <vector>

#include "kgddi/graph/loaders.hpp"
#include "kgddi/graph/subgraph.hpp"
#include "kgddi/model/config.hpp"
#include "kgddi/model/params.hpp"
#include "kgddi/tensor/tape.hpp"

namespace kgddi::model {

// Per-edge attention weights, parallel to subgraph.local_edges. A pruned
// edge has alpha exactly 0 and contributes nothing to propagation; every
// kept edge satisfies alpha > gamma.
struct AttentionMask {
  std::vector<double> alpha;
  std::vector<char> pruned;

  std::size_t kept() const {
    std::size_t n = 0;
    for (char p : pruned) n += p ? 0 : 1;
    return n;
  }
};

// Distance one-hot block: row i is onehot(dist_u[i], k+1) then
// onehot(dist_v[i], k+1), width 2(k+1).
tensor::Tensor position_features(const graph::EnclosingSubgraph& sg);

// Input features H0: row i = entity_embed[global id] concat position block.
tensor::Tensor build_node_features(const graph::EnclosingSubgraph& sg,
                                   const tensor::Tensor& entity_embed);

// Edge scores from node states h (one row per local node):
// raw(i, r, j) = tanh((h_j wj) dot (h_i wi + rel_embed[r]) / sqrt(width)).
// Direction matters: the head i carries the relation term, the tail j is the
// key side, and an edge and its reverse get independent scores. Kept iff
// raw > gamma, strictly, so the default gamma = 0 drops nonpositive signals.
AttentionMask compute_attention(const graph::EnclosingSubgraph& sg, const tensor::Tensor& h,
                                const tensor::Tensor& wi, const tensor::Tensor& wj,
                                const tensor::Tensor& rel_embed, double gamma);

// W_r for one layer: sum_b coeffs[r][b] * basis[b].
tensor::Tensor relation_matrix(const ModelParams& params, std::size_t layer, std::size_t r);

// One forward pass over a prepared tape. logits is a 1 x num_ddi_relations
// node; extending the tape with a loss and calling backward gives gradients
// of every parameter the pass touched. layer_masks records the attention
// actually applied at each layer: identical rows when the mask is layer
// independent, all-ones when summarization is off. states holds the input
// features followed by each layer's output; like logits, the handles are
// only readable while the tape is alive.
struct ForwardResult {
  tensor::Var logits;
  std::vector<AttentionMask> layer_masks;
  std::vector<tensor::Var> states;
};

ForwardResult forward_on_tape(tensor::Tape& tape, const graph::EnclosingSubgraph& sg,
                              ModelParams& params, const ModelConfig& cfg,
                              const graph::FingerprintTable& fingerprints, bool train,
                              std::mt19937_64& rng);

// Convenience wrapper owning a throwaway tape; returns the logits value.
tensor::Tensor forward(const graph::EnclosingSubgraph& sg, ModelParams& params,
                       const ModelConfig& cfg, const graph::FingerprintTable& fingerprints,
                       bool train, std::mt19937_64& rng);

// Inference-mode logits with a dummy rng; dropout never fires.
tensor::Tensor forward_infer(const graph::EnclosingSubgraph& sg, ModelParams& params,
                             const ModelConfig& cfg,
                             const graph::FingerprintTable& fingerprints);

}  // namespace kgddi::model
