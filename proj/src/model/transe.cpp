#include "kgddi/model/transe.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "kgddi/rng.hpp"

namespace kgddi::model {

using graph::Triplet;
using tensor::Tensor;

namespace {

void normalize_rows(Tensor& t) {
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double* row = t.row_ptr(i);
    double sq = 0.0;
    for (std::size_t j = 0; j < t.cols(); ++j) sq += row[j] * row[j];
    if (sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < t.cols(); ++j) row[j] *= inv;
  }
}

void fill_uniform(Tensor& t, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
  for (double& x : t.values()) x = (2.0 * uniform01(rng) - 1.0) * bound;
}

// Uniform entity other than `skip`; needs at least 2 entities.
std::uint32_t draw_other(std::mt19937_64& rng, std::size_t count, std::uint32_t skip) {
  auto w = static_cast<std::uint32_t>(uniform_index(rng, count - 1));
  return w >= skip ? w + 1 : w;
}

}  // namespace

Tensor transe_pretrain(const graph::KnowledgeGraph& kg, std::size_t d, std::size_t epochs,
                       double margin, double lr, std::uint64_t seed, Tensor* relations_out) {
  require(kg.triplets().size() > 0, "transe: graph has no triplets");
  require(d >= 1, "transe: dimension must be positive");
  require(lr > 0.0 && margin > 0.0, "transe: lr and margin must be positive");

  auto rng = make_rng(seed);
  Tensor entities(kg.num_entities(), d);
  Tensor relations(kg.num_relations(), d);
  fill_uniform(entities, rng);
  if (epochs == 0) {
    if (relations_out) *relations_out = Tensor();
    return entities;
  }

  require(kg.num_entities() >= 2, "transe: corruption needs at least two entities");
  fill_uniform(relations, rng);
  normalize_rows(relations);

  std::vector<std::size_t> order(kg.triplets().size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> delta_pos(d), delta_neg(d);

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    normalize_rows(entities);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[uniform_index(rng, i)]);

    for (std::size_t idx : order) {
      const Triplet& t = kg.triplets()[idx];
      const bool corrupt_head = uniform01(rng) < 0.5;
      const std::uint32_t w =
          draw_other(rng, kg.num_entities(), corrupt_head ? t.head : t.tail);
      const std::uint32_t neg_head = corrupt_head ? w : t.head;
      const std::uint32_t neg_tail = corrupt_head ? t.tail : w;

      const double* eh = entities.row_ptr(t.head);
      const double* et = entities.row_ptr(t.tail);
      const double* enh = entities.row_ptr(neg_head);
      const double* ent = entities.row_ptr(neg_tail);
      const double* q = relations.row_ptr(t.relation);

      double pos_sq = 0.0, neg_sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        delta_pos[j] = eh[j] + q[j] - et[j];
        delta_neg[j] = enh[j] + q[j] - ent[j];
        pos_sq += delta_pos[j] * delta_pos[j];
        neg_sq += delta_neg[j] * delta_neg[j];
      }
      if (margin + pos_sq - neg_sq <= 0.0) continue;

      // Descend on margin + ||dpos||^2 - ||dneg||^2 for the touched rows;
      // all adjoints read the pre-update values captured above.
      const double step = 2.0 * lr;
      double* mh = entities.row_ptr(t.head);
      double* mt = entities.row_ptr(t.tail);
      double* mnh = entities.row_ptr(neg_head);
      double* mnt = entities.row_ptr(neg_tail);
      double* mq = relations.row_ptr(t.relation);
      for (std::size_t j = 0; j < d; ++j) {
        const double dp = step * delta_pos[j];
        const double dn = step * delta_neg[j];
        mh[j] -= dp;
        mt[j] += dp;
        mq[j] -= dp;
        mnh[j] += dn;
        mnt[j] -= dn;
        mq[j] += dn;
      }
    }
  }
  if (relations_out) *relations_out = std::move(relations);
  return entities;
}

}  // namespace kgddi::model
