#pragma once

#include <string>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/graph/subgraph.hpp"
#include "kgddi/model/model.hpp"

namespace kgddi::explain {

struct PathwayNode {
  graph::EntityId global_id = 0;
  std::string display_name;
  std::string entity_type;  // name prefix before ':', empty when unknown
  bool is_center = false;

  friend bool operator==(const PathwayNode&, const PathwayNode&) = default;
};

// Endpoints are global entity ids, so an exported pathway is readable
// without the subgraph it came from.
struct PathwayEdge {
  graph::EntityId source = 0;
  graph::EntityId target = 0;
  std::string relation_name;
  double alpha = 0.0;

  friend bool operator==(const PathwayEdge&, const PathwayEdge&) = default;
};

// A pruned subgraph rendered as a reasoning pathway. Both centers are always
// present; every other node is incident to at least one kept edge. Nodes
// keep the subgraph's local order (centers first, then ascending global id)
// and edges keep the subgraph's edge order.
struct PathwayGraph {
  std::vector<PathwayNode> nodes;
  std::vector<PathwayEdge> edges;

  friend bool operator==(const PathwayGraph&, const PathwayGraph&) = default;
};

// Drops the mask's pruned edges, then every non-center node left without an
// incident edge. The kept edge set equals the subgraph's edge set minus the
// pruned entries, in order, with the mask's alpha attached. Names and entity
// types resolve through kg; unnamed graphs fall back to numeric labels.
PathwayGraph summarize_pathway(const graph::EnclosingSubgraph& sg, const model::AttentionMask& mask,
                               const graph::KnowledgeGraph& kg);

// Rendering knobs for DOT output. gamma anchors the shade ramp: an edge's
// tone is linear in (alpha - gamma)/(1 - gamma), light just above the
// threshold and black at alpha = 1. merge_antiparallel folds an edge and its
// reverse with the same relation into one undirected line at the larger
// alpha; one-directional edges keep their arrow.
struct DotStyle {
  double gamma = 0.0;
  bool merge_antiparallel = false;
};

// Graphviz text. Centers render as double circles, every other node as an
// ellipse; edge penwidth and grayscale color both follow the DotStyle ramp.
std::string to_dot(const PathwayGraph& pathway, const DotStyle& style = {});
void export_dot(const PathwayGraph& pathway, const std::string& path, const DotStyle& style = {});

// Stable serialization: alphabetically ordered keys, two-space indents,
// alpha fixed to six decimals. Identical pathways produce identical bytes.
std::string to_json_text(const PathwayGraph& pathway);
void export_json(const PathwayGraph& pathway, const std::string& path);

// Reads a document written by export_json. Alphas round-trip at the six
// decimals the file carries, so load -> export reproduces the bytes exactly.
PathwayGraph load_pathway_json(const std::string& path);

}  // namespace kgddi::explain
