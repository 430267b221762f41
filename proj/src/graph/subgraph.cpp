#include "kgddi/graph/subgraph.hpp"

#include <algorithm>
#include <unordered_map>

namespace kgddi::graph {

std::vector<std::uint32_t> bfs_distances(const KnowledgeGraph& kg, EntityId source,
                                         std::uint32_t cap) {
  require(source < kg.num_entities(), "bfs: source ", source, " out of range ",
          kg.num_entities());
  require(cap >= 1, "bfs: cap must be at least 1");
  std::vector<std::uint32_t> dist(kg.num_entities(), kUnreachable);
  std::vector<EntityId> queue;
  dist[source] = 0;
  queue.push_back(source);
  const auto& triplets = kg.triplets();
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const EntityId x = queue[qi];
    const std::uint32_t dx = dist[x];
    if (dx == cap) continue;  // frontier at the cap is not expanded
    for (std::uint32_t i = kg.out_begin(x); i < kg.out_end(x); ++i) {
      const EntityId nb = triplets[i].tail;
      if (dist[nb] == kUnreachable) {
        dist[nb] = dx + 1;
        queue.push_back(nb);
      }
    }
    for (std::uint32_t i = kg.in_begin(x); i < kg.in_end(x); ++i) {
      const EntityId nb = triplets[kg.in_index()[i]].head;
      if (dist[nb] == kUnreachable) {
        dist[nb] = dx + 1;
        queue.push_back(nb);
      }
    }
  }
  return dist;
}

namespace {

bool matches_either_direction(const Triplet& t, const std::vector<Triplet>& exclude) {
  for (const Triplet& ex : exclude) {
    if (t.relation != ex.relation) continue;
    if ((t.head == ex.head && t.tail == ex.tail) || (t.head == ex.tail && t.tail == ex.head))
      return true;
  }
  return false;
}

}  // namespace

EnclosingSubgraph extract_enclosing_subgraph(const KnowledgeGraph& kg, EntityId u, EntityId v,
                                             std::uint32_t k,
                                             const std::vector<Triplet>& exclude) {
  require(u != v, "enclosing subgraph: centers must differ, both are ", u);
  require(u < kg.num_entities() && v < kg.num_entities(), "enclosing subgraph: center out of range");
  const auto du = bfs_distances(kg, u, k);
  const auto dv = bfs_distances(kg, v, k);

  EnclosingSubgraph sub;
  sub.k = k;
  sub.center_u = u;
  sub.center_v = v;
  sub.global_nodes = {u, v};
  for (EntityId e = 0; e < kg.num_entities(); ++e) {
    if (e == u || e == v) continue;
    if (du[e] != kUnreachable && dv[e] != kUnreachable) sub.global_nodes.push_back(e);
  }

  auto clamped = [k](std::uint32_t d) { return d == kUnreachable ? k : std::min(d, k); };
  sub.dist_u.reserve(sub.global_nodes.size());
  sub.dist_v.reserve(sub.global_nodes.size());
  for (EntityId e : sub.global_nodes) {
    sub.dist_u.push_back(clamped(du[e]));
    sub.dist_v.push_back(clamped(dv[e]));
  }

  std::unordered_map<EntityId, std::uint32_t> local;
  local.reserve(sub.global_nodes.size());
  for (std::uint32_t i = 0; i < sub.global_nodes.size(); ++i) local.emplace(sub.global_nodes[i], i);

  const auto& triplets = kg.triplets();
  for (std::uint32_t li = 0; li < sub.global_nodes.size(); ++li) {
    const EntityId g = sub.global_nodes[li];
    for (std::uint32_t i = kg.out_begin(g); i < kg.out_end(g); ++i) {
      const Triplet& t = triplets[i];
      auto it = local.find(t.tail);
      if (it == local.end()) continue;
      if (!exclude.empty() && matches_either_direction(t, exclude)) continue;
      sub.local_edges.push_back({li, t.relation, it->second});
    }
  }
  return sub;
}

}  // namespace kgddi::graph
