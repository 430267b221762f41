#pragma once

#include <cstdint>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"

namespace kgddi::graph {

inline constexpr std::uint32_t kUnreachable = UINT32_MAX;

// Undirected BFS from source, expanding at most cap hops. Returns one entry
// per entity: hop distance, or kUnreachable beyond the cap.
std::vector<std::uint32_t> bfs_distances(const KnowledgeGraph& kg, EntityId source,
                                         std::uint32_t cap);

struct LocalEdge {
  std::uint32_t head;  // local node index
  RelationId relation;
  std::uint32_t tail;  // local node index

  friend bool operator==(const LocalEdge&, const LocalEdge&) = default;
};

// Node set N_k(u) intersect N_k(v), with u and v force-included. Local index
// 0 is u, 1 is v, the rest follow in ascending global id. Distances are
// clamped to k (unreachable centers included), so position features have a
// fixed k+1 bins per center.
struct EnclosingSubgraph {
  std::uint32_t k = 0;
  EntityId center_u = 0;
  EntityId center_v = 0;
  std::vector<EntityId> global_nodes;
  std::vector<std::uint32_t> dist_u;
  std::vector<std::uint32_t> dist_v;
  std::vector<LocalEdge> local_edges;

  std::size_t num_nodes() const { return global_nodes.size(); }
};

// Extracts the k-hop enclosing subgraph of (u, v). local_edges holds every kg
// triplet with both endpoints inside the node set, relabeled to local indices,
// except triplets matching an entry of `exclude` in either direction; the
// exclusion list carries the pair's own DDI edges so training never sees its
// target through the message-passing graph.
EnclosingSubgraph extract_enclosing_subgraph(const KnowledgeGraph& kg, EntityId u, EntityId v,
                                             std::uint32_t k,
                                             const std::vector<Triplet>& exclude = {});

}  // namespace kgddi::graph
