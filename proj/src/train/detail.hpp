#pragma once

#include <cstddef>
#include <vector>

#include "kgddi/error.hpp"
#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/graph/subgraph.hpp"
#include "kgddi/model/config.hpp"

namespace kgddi::train::detail {

inline std::vector<graph::Triplet> own_interaction_edges(const graph::DDIPair& pair,
                                                         graph::RelationId ddi_base) {
  std::vector<graph::Triplet> out;
  out.reserve(pair.labels.size());
  for (std::uint32_t l : pair.labels) out.push_back({pair.u, ddi_base + l, pair.v});
  return out;
}

// The pair's subgraph with its own interaction edges excluded in both
// directions, so the target labels are never visible to message passing.
inline graph::EnclosingSubgraph extract_pair(const graph::KnowledgeGraph& prop,
                                             const graph::DDIPair& pair, std::uint32_t k,
                                             graph::RelationId ddi_base) {
  return graph::extract_enclosing_subgraph(prop, pair.u, pair.v, k,
                                           own_interaction_edges(pair, ddi_base));
}

inline void check_dataset(const graph::DDIDataset& ds, std::uint32_t num_classes,
                          graph::TaskMode mode, const char* name) {
  require(!ds.pairs.empty(), name, " split has no pairs");
  require(ds.num_classes == num_classes, name, " split declares ", ds.num_classes,
          " classes, model expects ", num_classes);
  for (const graph::DDIPair& p : ds.pairs) {
    require(!p.labels.empty(), name, " split: pair (", p.u, ", ", p.v, ") has no labels");
    if (mode == graph::TaskMode::MultiClass)
      require(p.labels.size() == 1, name, " split: pair (", p.u, ", ", p.v, ") carries ",
              p.labels.size(), " labels in multi-class mode");
    for (std::uint32_t l : p.labels)
      require(l < ds.num_classes, name, " split: label ", l, " out of range for ", ds.num_classes,
              " classes");
  }
}

inline std::size_t edge_count(const graph::DDIDataset& ds, graph::TaskMode mode) {
  if (mode == graph::TaskMode::MultiClass) return ds.pairs.size();
  std::size_t n = 0;
  for (const graph::DDIPair& p : ds.pairs) n += p.labels.size();
  return n;
}

}  // namespace kgddi::train::detail
