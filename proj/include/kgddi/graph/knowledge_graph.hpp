#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgddi/error.hpp"

namespace kgddi::graph {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triplet {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

// Interned string table. Ids are assigned in first-appearance order, which
// makes id maps reproducible from the input files alone.
class Vocab {
 public:
  std::uint32_t get_or_add(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  std::optional<std::uint32_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(std::uint32_t id) const {
    require(id < names_.size(), "vocab: id ", id, " out of range ", names_.size());
    return names_[id];
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Immutable multi-relational directed graph. Triplets are stored sorted by
// (head, relation, tail) with exact duplicates collapsed; out-adjacency ranges
// index the triplet list directly and in-adjacency holds triplet indices
// grouped by tail. Safe for unrestricted concurrent reads.
class KnowledgeGraph {
 public:
  KnowledgeGraph(std::size_t num_entities, std::size_t num_relations,
                 std::vector<Triplet> triplets, std::vector<std::string> entity_names = {},
                 std::vector<std::string> relation_names = {});

  std::uint32_t num_entities() const { return num_entities_; }
  std::uint32_t num_relations() const { return num_relations_; }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  // Out edges of e are triplets()[out_begin(e) .. out_end(e)).
  std::uint32_t out_begin(EntityId e) const { return out_offsets_[e]; }
  std::uint32_t out_end(EntityId e) const { return out_offsets_[e + 1]; }
  // In edges of e are triplets()[in_index()[i]] for i in [in_begin(e), in_end(e)).
  std::uint32_t in_begin(EntityId e) const { return in_offsets_[e]; }
  std::uint32_t in_end(EntityId e) const { return in_offsets_[e + 1]; }
  const std::vector<std::uint32_t>& in_index() const { return in_index_; }

  // Incident triplet count; a self-loop contributes twice.
  std::uint32_t degree(EntityId e) const {
    return (out_end(e) - out_begin(e)) + (in_end(e) - in_begin(e));
  }

  bool has_names() const { return !entity_names_.empty(); }
  const std::string& entity_name(EntityId e) const {
    require(e < entity_names_.size(), "entity ", e, " has no name entry");
    return entity_names_[e];
  }
  const std::string& relation_name(RelationId r) const {
    require(r < relation_names_.size(), "relation ", r, " has no name entry");
    return relation_names_[r];
  }
  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const { return relation_names_; }

  // Type tag derived from the name prefix before ':' ("drug:17" -> "drug");
  // empty when unnamed or unprefixed.
  std::string entity_type(EntityId e) const;

 private:
  std::uint32_t num_entities_ = 0;
  std::uint32_t num_relations_ = 0;
  std::vector<Triplet> triplets_;
  std::vector<std::uint32_t> out_offsets_;  // num_entities + 1
  std::vector<std::uint32_t> in_offsets_;   // num_entities + 1
  std::vector<std::uint32_t> in_index_;     // triplet indices grouped by tail
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
};

enum class TaskMode { MultiClass, MultiLabel };

struct DDIPair {
  EntityId u;
  EntityId v;
  std::vector<std::uint32_t> labels;  // sorted, unique; exactly one in multi-class mode
};

struct DDIDataset {
  TaskMode mode = TaskMode::MultiClass;
  std::uint32_t num_classes = 0;  // every label is < num_classes
  std::vector<DDIPair> pairs;
};

}  // namespace kgddi::graph
