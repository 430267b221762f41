#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"

namespace kgddi::graph {

// Per-drug bit rows keyed by entity id. Drugs without a row read as all-zero,
// so a partial fingerprint file degrades gracefully instead of failing a run.
struct FingerprintTable {
  std::size_t width = 0;
  std::unordered_map<EntityId, std::vector<double>> rows;

  bool has(EntityId e) const { return rows.count(e) > 0; }
  std::vector<double> lookup(EntityId e) const {
    auto it = rows.find(e);
    return it == rows.end() ? std::vector<double>(width, 0.0) : it->second;
  }
};

// Triplet file: one `head<TAB>relation<TAB>tail` per line, '#' comments and
// blank lines skipped. Ids are interned into the supplied vocabs in
// first-appearance order.
std::vector<Triplet> load_kg_triplets(const std::string& path, Vocab& entities, Vocab& relations);

// Convenience form owning its vocabs; duplicate triplets collapse in the
// returned graph.
KnowledgeGraph load_kg(const std::string& path);

// Pair file: `drug1<TAB>drug2<TAB>label` (multi-class) or
// `drug1<TAB>drug2<TAB>l1,l2,...` (multi-label). Labels are non-negative
// class indices; num_classes becomes max label + 1. Drug names resolve
// against `entities`, appending unseen ones.
DDIDataset load_ddi(const std::string& path, TaskMode mode, Vocab& entities);

// Fingerprint file: `drug_id<TAB>bitstring` with every bitstring the same
// width of 0/1 characters. Rows naming drugs absent from `entities` are
// skipped (fingerprint libraries routinely cover a superset of the dataset).
FingerprintTable load_fingerprints(const std::string& path, const Vocab& entities);

// Two-column `id<TAB>name` TSV in id order.
void write_id_map_tsv(const std::string& path, const Vocab& vocab);

}  // namespace kgddi::graph
