#include <cmath>

#include "kgddi/model/model.hpp"
#include "kgddi/tensor/kernels.hpp"

namespace kgddi::model {

using graph::EnclosingSubgraph;
using tensor::Tensor;

Tensor position_features(const EnclosingSubgraph& sg) {
  const std::size_t bins = sg.k + 1;
  Tensor out(sg.num_nodes(), 2 * bins);
  for (std::size_t i = 0; i < sg.num_nodes(); ++i) {
    require(sg.dist_u[i] < bins && sg.dist_v[i] < bins, "position features: node ", i,
            " distance exceeds hop budget ", sg.k);
    out.at(i, sg.dist_u[i]) = 1.0;
    out.at(i, bins + sg.dist_v[i]) = 1.0;
  }
  return out;
}

Tensor build_node_features(const EnclosingSubgraph& sg, const Tensor& entity_embed) {
  const std::size_t d = entity_embed.cols();
  const std::size_t bins = sg.k + 1;
  Tensor pos = position_features(sg);
  Tensor out(sg.num_nodes(), d + 2 * bins);
  for (std::size_t i = 0; i < sg.num_nodes(); ++i) {
    require(sg.global_nodes[i] < entity_embed.rows(), "node features: entity ",
            sg.global_nodes[i], " outside embedding table of ", entity_embed.rows());
    const double* emb = entity_embed.row_ptr(sg.global_nodes[i]);
    double* row = out.row_ptr(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = emb[j];
    for (std::size_t j = 0; j < 2 * bins; ++j) row[d + j] = pos.at(i, j);
  }
  return out;
}

AttentionMask compute_attention(const EnclosingSubgraph& sg, const Tensor& h, const Tensor& wi,
                                const Tensor& wj, const Tensor& rel_embed, double gamma) {
  const std::size_t w = h.cols();
  require(wi.rows() == w && wi.cols() == w && wj.rows() == w && wj.cols() == w,
          "attention: weight shapes ", wi.shape_str(), "/", wj.shape_str(),
          " do not match state width ", w);
  require(rel_embed.cols() == w, "attention: relation embedding width ", rel_embed.cols(),
          " does not match state width ", w);
  require(h.rows() == sg.num_nodes(), "attention: ", h.rows(), " state rows for ",
          sg.num_nodes(), " nodes");

  Tensor hi(h.rows(), w), hj(h.rows(), w);
  tensor::kernels::active().matmul(h.data(), wi.data(), hi.data(), h.rows(), w, w);
  tensor::kernels::active().matmul(h.data(), wj.data(), hj.data(), h.rows(), w, w);

  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(w));
  AttentionMask mask;
  mask.alpha.resize(sg.local_edges.size());
  mask.pruned.resize(sg.local_edges.size());
  for (std::size_t e = 0; e < sg.local_edges.size(); ++e) {
    const graph::LocalEdge& edge = sg.local_edges[e];
    require(edge.relation < rel_embed.rows(), "attention: relation ", edge.relation,
            " outside embedding table of ", rel_embed.rows());
    const double* q = hi.row_ptr(edge.head);
    const double* r = rel_embed.row_ptr(edge.relation);
    const double* key = hj.row_ptr(edge.tail);
    double s = 0.0;
    for (std::size_t c = 0; c < w; ++c) s += (q[c] + r[c]) * key[c];
    const double raw = std::tanh(s * inv_sqrt);
    const bool keep = raw > gamma;
    mask.alpha[e] = keep ? raw : 0.0;
    mask.pruned[e] = keep ? 0 : 1;
  }
  return mask;
}

Tensor relation_matrix(const ModelParams& params, std::size_t layer, std::size_t r) {
  require(layer < params.layers.size(), "relation_matrix: layer ", layer, " of ",
          params.layers.size());
  const LayerParams& lp = params.layers[layer];
  require(r < params.num_relations, "relation_matrix: relation ", r, " of ",
          params.num_relations);
  Tensor out(lp.basis[0].rows(), lp.basis[0].cols());
  for (std::size_t b = 0; b < lp.basis.size(); ++b)
    tensor::kernels::active().axpy(lp.coeffs.at(r, b), lp.basis[b].data(), out.data(),
                                   out.numel());
  return out;
}

}  // namespace kgddi::model
