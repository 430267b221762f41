#pragma once

#include <cstdint>

#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/tensor/tensor.hpp"

namespace kgddi::model {

// Margin-ranking translation pretraining over the kg triplets, used to seed
// the entity embedding table. Squared L2 distance; one corrupted triplet per
// positive, replacing head or tail by a fair coin with a uniformly drawn
// substitute entity; entity rows are L2-normalized at the start of every
// epoch, relation rows once at init. 0 epochs returns the random init
// untouched, which is the documented way to skip pretraining. relations_out,
// when given, receives the trained relation table (empty for 0 epochs).
tensor::Tensor transe_pretrain(const graph::KnowledgeGraph& kg, std::size_t d,
                               std::size_t epochs, double margin, double lr, std::uint64_t seed,
                               tensor::Tensor* relations_out = nullptr);

}  // namespace kgddi::model
