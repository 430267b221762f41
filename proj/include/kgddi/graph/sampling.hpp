#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"

namespace kgddi::graph {

// Per-entity undirected degrees with cumulative d^(3/4) weights, the sampling
// distribution for corrupted tails. Immutable after construction.
class DegreeTable {
 public:
  explicit DegreeTable(const KnowledgeGraph& kg);

  std::uint32_t degree(EntityId e) const { return degree_[e]; }
  double total_weight() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::size_t size() const { return degree_.size(); }
  double weight(EntityId e) const;

  // One d^(3/4)-proportional draw; zero-degree entities are never returned.
  // Requires total_weight() > 0.
  EntityId sample(std::mt19937_64& rng) const;

 private:
  std::vector<std::uint32_t> degree_;
  std::vector<double> cumulative_;
};

// Exact membership set over (head, relation, tail) keys.
class TripletSet {
 public:
  void insert(EntityId h, RelationId r, EntityId t) {
    by_relation_[r].insert(pack(h, t));
  }
  void insert(const Triplet& t) { insert(t.head, t.relation, t.tail); }

  bool contains(EntityId h, RelationId r, EntityId t) const {
    auto it = by_relation_.find(r);
    return it != by_relation_.end() && it->second.count(pack(h, t)) > 0;
  }
  bool contains(const Triplet& t) const { return contains(t.head, t.relation, t.tail); }

 private:
  static std::uint64_t pack(EntityId h, EntityId t) {
    return (static_cast<std::uint64_t>(h) << 32) | t;
  }
  std::unordered_map<RelationId, std::unordered_set<std::uint64_t>> by_relation_;
};

// Draws w distinct from both endpoints of the positive (a tail equal to the
// head would form a self-pair) with (positive.head, positive.relation, w)
// outside `forbidden`, proportional to degree^(3/4). After 100 rejections (or
// when every weight is zero) falls back to a uniform draw over the admissible
// set; errors when that set is empty.
EntityId sample_negative_tail(const DegreeTable& degrees, const Triplet& positive,
                              const TripletSet& forbidden, std::mt19937_64& rng);

}  // namespace kgddi::graph
