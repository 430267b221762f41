#include "kgddi/graph/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "kgddi/rng.hpp"

namespace kgddi::graph {

DegreeTable::DegreeTable(const KnowledgeGraph& kg) {
  degree_.resize(kg.num_entities());
  cumulative_.resize(kg.num_entities());
  double acc = 0.0;
  for (EntityId e = 0; e < kg.num_entities(); ++e) {
    degree_[e] = kg.degree(e);
    acc += std::pow(static_cast<double>(degree_[e]), 0.75);
    cumulative_[e] = acc;
  }
}

double DegreeTable::weight(EntityId e) const {
  require(e < degree_.size(), "degree table: entity ", e, " out of range");
  return std::pow(static_cast<double>(degree_[e]), 0.75);
}

EntityId DegreeTable::sample(std::mt19937_64& rng) const {
  const double total = total_weight();
  require(total > 0.0, "degree sample: all degrees are zero");
  const double x = uniform01(rng) * total;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  if (it == cumulative_.end()) --it;  // x can graze the top through rounding
  return static_cast<EntityId>(it - cumulative_.begin());
}

EntityId sample_negative_tail(const DegreeTable& degrees, const Triplet& positive,
                              const TripletSet& forbidden, std::mt19937_64& rng) {
  constexpr int kRetryBudget = 100;
  // the head is never admissible either: a corrupted tail equal to the head
  // would form a self-pair, which the pair datasets reject outright
  if (degrees.total_weight() > 0.0) {
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
      const EntityId w = degrees.sample(rng);
      if (w == positive.tail || w == positive.head) continue;
      if (forbidden.contains(positive.head, positive.relation, w)) continue;
      return w;
    }
  }
  std::vector<EntityId> admissible;
  for (EntityId w = 0; w < degrees.size(); ++w) {
    if (w == positive.tail || w == positive.head) continue;
    if (forbidden.contains(positive.head, positive.relation, w)) continue;
    admissible.push_back(w);
  }
  require(!admissible.empty(), "negative sampling: no admissible tail for (", positive.head, ", ",
          positive.relation, ", ", positive.tail, ")");
  return admissible[uniform_index(rng, admissible.size())];
}

}  // namespace kgddi::graph
