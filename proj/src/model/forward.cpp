#include <cmath>
#include <map>
#include <tuple>

#include "kgddi/model/model.hpp"
#include "kgddi/rng.hpp"

namespace kgddi::model {

using graph::EnclosingSubgraph;
using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

namespace {

// State threaded through one forward pass. Edge endpoints are flattened once;
// relation grouping is ascending by id so message accumulation order is fixed
// and two identical passes agree bitwise.
struct Pass {
  Tape& tape;
  const EnclosingSubgraph& sg;
  ModelParams& params;
  const ModelConfig& cfg;
  bool train;
  std::mt19937_64& rng;

  std::vector<std::uint32_t> heads, tails;
  std::vector<std::uint32_t> rels;
  std::map<graph::RelationId, std::vector<std::uint32_t>> edges_by_relation;

  Pass(Tape& t, const EnclosingSubgraph& s, ModelParams& p, const ModelConfig& c, bool tr,
       std::mt19937_64& r)
      : tape(t), sg(s), params(p), cfg(c), train(tr), rng(r) {
    heads.reserve(sg.local_edges.size());
    tails.reserve(sg.local_edges.size());
    rels.reserve(sg.local_edges.size());
    for (std::size_t e = 0; e < sg.local_edges.size(); ++e) {
      const graph::LocalEdge& edge = sg.local_edges[e];
      require(edge.relation < params.num_relations, "forward: relation ", edge.relation,
              " outside parameter tables of ", params.num_relations);
      heads.push_back(edge.head);
      tails.push_back(edge.tail);
      rels.push_back(edge.relation);
      edges_by_relation[edge.relation].push_back(static_cast<std::uint32_t>(e));
    }
  }

  std::size_t num_edges() const { return sg.local_edges.size(); }

  Var input_features() {
    Var emb = tape.param_rows(params.entity_embed, sg.global_nodes);
    Var pos = tape.leaf(position_features(sg));
    return tape.concat({emb, pos}, 1);
  }

  // Eq-style scores for every edge from the states in h: the head row (plus
  // the relation embedding) is the query side, the tail row the key side.
  // Returns the m x 1 alpha column with pruned entries already zeroed by a
  // constant 0/1 keep mask, so pruned edges pass no value and no gradient.
  std::pair<Var, AttentionMask> attention(Var h, Tensor& wi, Tensor& wj, Tensor& rel_table) {
    const std::size_t width = tape.value(h).cols();
    Var hi = tape.matmul(h, tape.param(wi));
    Var hj = tape.matmul(h, tape.param(wj));
    Var query = tape.add(tape.gather_rows(hi, heads), tape.param_rows(rel_table, rels));
    Var key = tape.gather_rows(hj, tails);
    Var score = tape.row_sum(tape.mul(query, key));
    Var raw = tape.tanh(tape.scale(score, 1.0 / std::sqrt(static_cast<double>(width))));

    const Tensor& rv = tape.value(raw);
    AttentionMask mask;
    mask.alpha.resize(num_edges());
    mask.pruned.resize(num_edges());
    Tensor keep(num_edges(), 1);
    for (std::size_t e = 0; e < num_edges(); ++e) {
      const bool kept = rv.at(e, 0) > cfg.gamma;
      keep.at(e, 0) = kept ? 1.0 : 0.0;
      mask.alpha[e] = kept ? rv.at(e, 0) : 0.0;
      mask.pruned[e] = kept ? 0 : 1;
    }
    return {tape.mul(raw, tape.leaf(std::move(keep))), mask};
  }

  AttentionMask all_ones_mask() const {
    AttentionMask mask;
    mask.alpha.assign(num_edges(), 1.0);
    mask.pruned.assign(num_edges(), 0);
    return mask;
  }

  // One propagation layer: self transform plus alpha-weighted relation
  // messages along in-edges, then ReLU and (train-mode) dropout.
  // alpha.valid() is false under the no-summarization ablation, which is the
  // alpha == 1 case, so the per-row scaling is skipped entirely.
  Var layer(std::size_t l, Var h_prev, Var alpha) {
    LayerParams& lp = params.layers[l];
    Var acc = tape.matmul(h_prev, tape.param(lp.w_self));
    if (num_edges() > 0) {
      Var coeffs = tape.param(lp.coeffs);
      std::vector<Var> bases;
      bases.reserve(lp.basis.size());
      for (Tensor& v : lp.basis) bases.push_back(tape.param(v));
      for (const auto& [rel, edge_ids] : edges_by_relation) {
        Var w_r = tape.basis_combine(tape.gather_rows(coeffs, {rel}), bases);
        std::vector<std::uint32_t> src, dst;
        src.reserve(edge_ids.size());
        dst.reserve(edge_ids.size());
        for (std::uint32_t e : edge_ids) {
          src.push_back(heads[e]);
          dst.push_back(tails[e]);
        }
        Var msg = tape.matmul(tape.gather_rows(h_prev, src), w_r);
        if (alpha.valid()) msg = tape.scale_rows(msg, tape.gather_rows(alpha, edge_ids));
        acc = tape.scatter_add_rows(acc, std::move(dst), msg);
      }
    }
    return tape.dropout(tape.relu(acc), cfg.dropout_p, rng, train);
  }

  // Readout: per layer, nodes are projected through the shared w_sub and
  // averaged; layer blocks are concatenated in layer order.
  Var readout(const std::vector<Var>& layer_states) {
    Var w_sub = tape.param(params.w_sub);
    std::vector<Var> parts;
    parts.reserve(layer_states.size());
    for (Var h : layer_states) parts.push_back(tape.mean_rows(tape.matmul(h, w_sub)));
    return tape.concat(parts, 1);
  }

  Var drug_representation(std::uint32_t local_index, graph::EntityId global_id,
                          const std::vector<Var>& layer_states,
                          const graph::FingerprintTable& fingerprints) {
    std::vector<Var> parts;
    parts.reserve(layer_states.size() + 1);
    for (Var h : layer_states) parts.push_back(tape.gather_rows(h, {local_index}));
    if (cfg.use_fingerprint)
      parts.push_back(tape.leaf(Tensor(1, fingerprints.width, fingerprints.lookup(global_id))));
    return tape.concat(parts, 1);
  }
};

}  // namespace

ForwardResult forward_on_tape(Tape& tape, const EnclosingSubgraph& sg, ModelParams& params,
                              const ModelConfig& cfg,
                              const graph::FingerprintTable& fingerprints, bool train,
                              std::mt19937_64& rng) {
  params.check_shapes(cfg);
  require(sg.k == cfg.k, "forward: subgraph extracted at k=", sg.k, " but config expects k=",
          cfg.k);
  require(sg.num_nodes() >= 2, "forward: subgraph is missing its centers");
  if (cfg.use_fingerprint)
    require(fingerprints.width == cfg.fingerprint_bits, "forward: fingerprint width ",
            fingerprints.width, " does not match configured ", cfg.fingerprint_bits);

  Pass pass(tape, sg, params, cfg, train, rng);
  Var h0 = pass.input_features();

  ForwardResult out;
  Var alpha;  // invalid stands for the constant all-ones mask
  AttentionMask first_mask;
  if (cfg.use_summarization && pass.num_edges() > 0)
    std::tie(alpha, first_mask) =
        pass.attention(h0, params.attn_wi, params.attn_wj, params.rel_attn_embed);
  else
    first_mask = pass.all_ones_mask();

  std::vector<Var> layer_states;
  layer_states.reserve(cfg.L);
  Var h_prev = h0;
  for (std::size_t l = 0; l < cfg.L; ++l) {
    const bool reuse_mask = l == 0 || !cfg.use_summarization ||
                            cfg.layer_independent_attention || pass.num_edges() == 0;
    if (reuse_mask) {
      out.layer_masks.push_back(first_mask);
    } else {
      // Recomputed from this layer's own input states (ablation of layer
      // independence); layer 0 above always scores from the input features.
      LayerParams& lp = params.layers[l];
      AttentionMask local;
      std::tie(alpha, local) = pass.attention(h_prev, lp.attn_wi, lp.attn_wj, lp.rel_attn);
      out.layer_masks.push_back(std::move(local));
    }
    h_prev = pass.layer(l, h_prev, alpha);
    layer_states.push_back(h_prev);
  }

  Var h_u = pass.drug_representation(0, sg.center_u, layer_states, fingerprints);
  Var h_v = pass.drug_representation(1, sg.center_v, layer_states, fingerprints);
  std::vector<Var> pair_parts = {h_u, h_v};
  if (cfg.use_subgraph_feature) pair_parts.push_back(pass.readout(layer_states));
  Var pair = tape.concat(pair_parts, 1);

  out.logits = tape.matmul(pair, tape.param(params.w_pred));
  out.states.push_back(h0);
  for (Var h : layer_states) out.states.push_back(h);
  return out;
}

Tensor forward(const EnclosingSubgraph& sg, ModelParams& params, const ModelConfig& cfg,
               const graph::FingerprintTable& fingerprints, bool train, std::mt19937_64& rng) {
  Tape tape;
  ForwardResult r = forward_on_tape(tape, sg, params, cfg, fingerprints, train, rng);
  return tape.value(r.logits);
}

Tensor forward_infer(const EnclosingSubgraph& sg, ModelParams& params, const ModelConfig& cfg,
                     const graph::FingerprintTable& fingerprints) {
  auto rng = make_rng(0);  // never consulted: dropout is a no-op outside training
  return forward(sg, params, cfg, fingerprints, false, rng);
}

}  // namespace kgddi::model
