#pragma once

#include <array>
#include <cstdint>

#include "kgddi/graph/knowledge_graph.hpp"

namespace kgddi::graph {

struct PropagationResult {
  KnowledgeGraph graph;
  RelationId ddi_base;  // interaction relations occupy [ddi_base, ddi_base + num_classes)
};

// Builds the message-passing graph: all KG triplets plus one triplet per
// train pair-label, with interaction labels mapped into a contiguous
// relation block at the end of the table ("ddi:<label>" names; KG relations
// already carrying such names are folded into the block). Dev and test pairs
// are never added, and any pre-existing interaction-range triplet joining a
// dev or test pair (either direction, any label) is dropped so evaluation
// pairs cannot see themselves through message passing.
PropagationResult build_propagation_graph(const KnowledgeGraph& kg, const DDIDataset& train,
                                          const DDIDataset& dev, const DDIDataset& test,
                                          std::uint32_t num_classes);

struct SplitRatios {
  double train = 0.7;
  double dev = 0.1;
  double test = 0.2;
};

// Disjoint, exhaustive, seed-deterministic partition of the pairs. With
// stratified set, every class holding at least 3 pairs lands in all three
// splits (strata are the lowest label of each pair); classes below 3 pairs
// go entirely to train. Unstratified splits use exact floor-proportional
// sizes with the remainder on test.
std::array<DDIDataset, 3> split_dataset(const DDIDataset& ddi, SplitRatios ratios, bool stratified,
                                        std::uint64_t seed);

}  // namespace kgddi::graph
