#include "kgddi/graph/knowledge_graph.hpp"

#include <algorithm>

namespace kgddi::graph {

KnowledgeGraph::KnowledgeGraph(std::size_t num_entities, std::size_t num_relations,
                               std::vector<Triplet> triplets,
                               std::vector<std::string> entity_names,
                               std::vector<std::string> relation_names)
    : num_entities_(static_cast<std::uint32_t>(num_entities)),
      num_relations_(static_cast<std::uint32_t>(num_relations)),
      triplets_(std::move(triplets)),
      entity_names_(std::move(entity_names)),
      relation_names_(std::move(relation_names)) {
  require(num_entities < UINT32_MAX && num_relations < UINT32_MAX, "graph: id overflow");
  require(entity_names_.empty() || entity_names_.size() == num_entities,
          "graph: ", entity_names_.size(), " entity names for ", num_entities, " entities");
  require(relation_names_.empty() || relation_names_.size() == num_relations,
          "graph: ", relation_names_.size(), " relation names for ", num_relations, " relations");
  for (const Triplet& t : triplets_) {
    require(t.head < num_entities_ && t.tail < num_entities_, "graph: entity id out of range in (",
            t.head, ", ", t.relation, ", ", t.tail, ")");
    require(t.relation < num_relations_, "graph: relation id ", t.relation, " out of range ",
            num_relations_);
  }
  std::sort(triplets_.begin(), triplets_.end());
  triplets_.erase(std::unique(triplets_.begin(), triplets_.end()), triplets_.end());

  out_offsets_.assign(num_entities_ + 1, 0);
  for (const Triplet& t : triplets_) ++out_offsets_[t.head + 1];
  for (std::size_t e = 0; e < num_entities_; ++e) out_offsets_[e + 1] += out_offsets_[e];

  in_offsets_.assign(num_entities_ + 1, 0);
  for (const Triplet& t : triplets_) ++in_offsets_[t.tail + 1];
  for (std::size_t e = 0; e < num_entities_; ++e) in_offsets_[e + 1] += in_offsets_[e];
  in_index_.resize(triplets_.size());
  std::vector<std::uint32_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::uint32_t i = 0; i < triplets_.size(); ++i)
    in_index_[cursor[triplets_[i].tail]++] = i;
}

std::string KnowledgeGraph::entity_type(EntityId e) const {
  if (e >= entity_names_.size()) return {};
  const std::string& n = entity_names_[e];
  auto pos = n.find(':');
  return pos == std::string::npos ? std::string{} : n.substr(0, pos);
}

}  // namespace kgddi::graph
