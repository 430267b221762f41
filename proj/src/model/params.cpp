#include "kgddi/model/params.hpp"

#include <cmath>

#include "kgddi/rng.hpp"

namespace kgddi::model {

using tensor::Tensor;

namespace {

// Visits tensors in the one canonical order shared by init, the optimizer,
// and the checkpoint layout.
template <typename Params, typename Fn>
void for_each_named(Params& p, Fn&& fn) {
  fn("entity_embed", &p.entity_embed);
  fn("attn_wi", &p.attn_wi);
  fn("attn_wj", &p.attn_wj);
  fn("rel_attn_embed", &p.rel_attn_embed);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (std::size_t b = 0; b < layer.basis.size(); ++b)
      fn(prefix + "basis" + std::to_string(b), &layer.basis[b]);
    fn(prefix + "coeffs", &layer.coeffs);
    fn(prefix + "w_self", &layer.w_self);
    if (layer.has_local_attention()) {
      fn(prefix + "attn_wi", &layer.attn_wi);
      fn(prefix + "attn_wj", &layer.attn_wj);
      fn(prefix + "rel_attn", &layer.rel_attn);
    }
  }
  fn("w_sub", &p.w_sub);
  fn("w_pred", &p.w_pred);
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for_each_named(*this, [&](const std::string& name, Tensor* t) { out.emplace_back(name, t); });
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for_each_named(*this,
                 [&](const std::string& name, const Tensor* t) { out.emplace_back(name, t); });
  return out;
}

std::vector<Tensor*> ModelParams::tensors() {
  std::vector<Tensor*> out;
  for (auto& [name, t] : named_tensors()) out.push_back(t);
  return out;
}

void ModelParams::check_shapes(const ModelConfig& cfg) const {
  const std::size_t d0 = cfg.d0();
  auto expect = [](const Tensor& t, std::size_t r, std::size_t c, const char* name) {
    require(t.rows() == r && t.cols() == c, "params: ", name, " is ", t.shape_str(),
            ", expected ", r, "x", c);
  };
  expect(entity_embed, num_entities, cfg.d, "entity_embed");
  expect(attn_wi, d0, d0, "attn_wi");
  expect(attn_wj, d0, d0, "attn_wj");
  expect(rel_attn_embed, num_relations, d0, "rel_attn_embed");
  require(layers.size() == cfg.L, "params: ", layers.size(), " layers, expected ", cfg.L);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t in_width = l == 0 ? d0 : cfg.d;
    const LayerParams& layer = layers[l];
    require(layer.basis.size() == cfg.B, "params: layer ", l, " has ", layer.basis.size(),
            " bases, expected ", cfg.B);
    for (const Tensor& v : layer.basis) expect(v, in_width, cfg.d, "basis");
    expect(layer.coeffs, num_relations, cfg.B, "coeffs");
    expect(layer.w_self, in_width, cfg.d, "w_self");
    const bool wants_local = !cfg.layer_independent_attention && l > 0;
    require(layer.has_local_attention() == wants_local, "params: layer ", l,
            wants_local ? " is missing" : " unexpectedly carries", " per-layer attention");
    if (wants_local) {
      expect(layer.attn_wi, in_width, in_width, "layer attn_wi");
      expect(layer.attn_wj, in_width, in_width, "layer attn_wj");
      expect(layer.rel_attn, num_relations, in_width, "layer rel_attn");
    }
  }
  expect(w_sub, cfg.d, cfg.d, "w_sub");
  expect(w_pred, cfg.pair_width(), cfg.num_ddi_relations, "w_pred");
}

ModelParams init_params(const ModelConfig& cfg, std::size_t num_entities,
                        std::size_t num_relations, std::uint64_t seed) {
  require(num_entities >= 1 && num_relations >= 1,
          "init_params: entity and relation counts must be positive");
  cfg.validate(num_relations);

  ModelParams p;
  p.num_entities = num_entities;
  p.num_relations = num_relations;

  const std::size_t d0 = cfg.d0();
  p.entity_embed = Tensor(num_entities, cfg.d);
  p.attn_wi = Tensor(d0, d0);
  p.attn_wj = Tensor(d0, d0);
  p.rel_attn_embed = Tensor(num_relations, d0);
  p.layers.resize(cfg.L);
  for (std::size_t l = 0; l < cfg.L; ++l) {
    const std::size_t in_width = l == 0 ? d0 : cfg.d;
    LayerParams& layer = p.layers[l];
    layer.basis.assign(cfg.B, Tensor(in_width, cfg.d));
    layer.coeffs = Tensor(num_relations, cfg.B);
    layer.w_self = Tensor(in_width, cfg.d);
    if (!cfg.layer_independent_attention && l > 0) {
      layer.attn_wi = Tensor(in_width, in_width);
      layer.attn_wj = Tensor(in_width, in_width);
      layer.rel_attn = Tensor(num_relations, in_width);
    }
  }
  p.w_sub = Tensor(cfg.d, cfg.d);
  p.w_pred = Tensor(cfg.pair_width(), cfg.num_ddi_relations);

  auto rng = make_rng(seed);
  for (auto& [name, t] : p.named_tensors()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(t->rows() + t->cols()));
    for (double& x : t->values()) x = (2.0 * uniform01(rng) - 1.0) * bound;
    t->requires_grad = true;
  }
  return p;
}

}  // namespace kgddi::model
