#include "kgddi/graph/propagation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <unordered_set>

#include "kgddi/rng.hpp"

namespace kgddi::graph {

namespace {

// "ddi:<int>" with value < num_classes marks a relation as interaction-range.
bool parse_ddi_label(const std::string& name, std::uint32_t num_classes, std::uint32_t& label) {
  if (name.rfind("ddi:", 0) != 0) return false;
  const char* first = name.data() + 4;
  const char* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, label);
  return ec == std::errc() && ptr == last && first != last && label < num_classes;
}

std::uint64_t pack_pair(EntityId a, EntityId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

PropagationResult build_propagation_graph(const KnowledgeGraph& kg, const DDIDataset& train,
                                          const DDIDataset& dev, const DDIDataset& test,
                                          std::uint32_t num_classes) {
  // New relation table: KG relations minus any ddi:<l> names, then the
  // contiguous interaction block.
  std::vector<std::string> relation_names;
  std::vector<RelationId> remap(kg.num_relations());
  std::vector<bool> was_ddi(kg.num_relations(), false);
  std::vector<std::uint32_t> ddi_label(kg.num_relations(), 0);
  for (RelationId r = 0; r < kg.num_relations(); ++r) {
    std::uint32_t label = 0;
    if (!kg.relation_names().empty() && parse_ddi_label(kg.relation_name(r), num_classes, label)) {
      was_ddi[r] = true;
      ddi_label[r] = label;
    } else {
      remap[r] = static_cast<RelationId>(relation_names.size());
      relation_names.push_back(kg.relation_names().empty() ? "rel:" + std::to_string(r)
                                                           : kg.relation_name(r));
    }
  }
  const RelationId ddi_base = static_cast<RelationId>(relation_names.size());
  for (std::uint32_t l = 0; l < num_classes; ++l) relation_names.push_back("ddi:" + std::to_string(l));
  for (RelationId r = 0; r < kg.num_relations(); ++r)
    if (was_ddi[r]) remap[r] = ddi_base + ddi_label[r];

  std::unordered_set<std::uint64_t> held_out;  // dev/test endpoints, both orders
  for (const DDIDataset* ds : {&dev, &test})
    for (const DDIPair& p : ds->pairs) {
      held_out.insert(pack_pair(p.u, p.v));
      held_out.insert(pack_pair(p.v, p.u));
    }

  std::vector<Triplet> triplets;
  triplets.reserve(kg.triplets().size() + train.pairs.size());
  for (const Triplet& t : kg.triplets()) {
    const RelationId r = remap[t.relation];
    if (r >= ddi_base && held_out.count(pack_pair(t.head, t.tail))) continue;
    triplets.push_back({t.head, r, t.tail});
  }
  for (const DDIPair& p : train.pairs)
    for (std::uint32_t l : p.labels) {
      require(l < num_classes, "propagation graph: train label ", l, " exceeds ", num_classes,
              " classes");
      triplets.push_back({p.u, ddi_base + l, p.v});
    }

  const std::size_t num_relations = relation_names.size();
  KnowledgeGraph graph(kg.num_entities(), num_relations, std::move(triplets), kg.entity_names(),
                       std::move(relation_names));
  return {std::move(graph), ddi_base};
}

namespace {

void append_pairs(DDIDataset& dst, const DDIDataset& src, const std::vector<std::uint32_t>& idx) {
  for (std::uint32_t i : idx) dst.pairs.push_back(src.pairs[i]);
}

std::array<std::size_t, 3> quota_sizes(std::size_t n, const SplitRatios& r, bool force_all_three) {
  std::array<std::size_t, 3> q;
  q[0] = static_cast<std::size_t>(static_cast<double>(n) * r.train + 1e-9);
  q[1] = static_cast<std::size_t>(static_cast<double>(n) * r.dev + 1e-9);
  q[2] = n - q[0] - q[1];
  if (force_all_three && n >= 3) {
    // Pull from the largest bucket (latest on ties) until none is empty.
    while (q[0] == 0 || q[1] == 0 || q[2] == 0) {
      std::size_t largest = 0;
      for (std::size_t i = 1; i < 3; ++i)
        if (q[i] >= q[largest]) largest = i;
      std::size_t smallest = q[0] == 0 ? 0 : (q[1] == 0 ? 1 : 2);
      --q[largest];
      ++q[smallest];
    }
  }
  return q;
}

}  // namespace

std::array<DDIDataset, 3> split_dataset(const DDIDataset& ddi, SplitRatios ratios, bool stratified,
                                        std::uint64_t seed) {
  require(!ddi.pairs.empty(), "split: empty dataset");
  require(ratios.train >= 0 && ratios.dev >= 0 && ratios.test >= 0 &&
              std::abs(ratios.train + ratios.dev + ratios.test - 1.0) <= 1e-9,
          "split: ratios must be non-negative and sum to 1");

  std::array<DDIDataset, 3> out;
  for (DDIDataset& d : out) {
    d.mode = ddi.mode;
    d.num_classes = ddi.num_classes;
  }

  auto shuffle_indices = [](std::vector<std::uint32_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  };

  if (!stratified) {
    std::vector<std::uint32_t> idx(ddi.pairs.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto rng = make_rng(seed);
    shuffle_indices(idx, rng);
    auto q = quota_sizes(idx.size(), ratios, false);
    append_pairs(out[0], ddi, {idx.begin(), idx.begin() + q[0]});
    append_pairs(out[1], ddi, {idx.begin() + q[0], idx.begin() + q[0] + q[1]});
    append_pairs(out[2], ddi, {idx.begin() + q[0] + q[1], idx.end()});
    return out;
  }

  // Ordered map keeps class iteration deterministic regardless of label order
  // in the file.
  std::map<std::uint32_t, std::vector<std::uint32_t>> strata;
  for (std::uint32_t i = 0; i < ddi.pairs.size(); ++i) {
    require(!ddi.pairs[i].labels.empty(), "split: pair ", i, " has no labels");
    strata[ddi.pairs[i].labels.front()].push_back(i);
  }
  for (auto& [label, members] : strata) {
    auto rng = make_rng(mix_seed(seed, label));
    shuffle_indices(members, rng);
    if (members.size() < 3) {
      append_pairs(out[0], ddi, members);  // too small to cover three splits
      continue;
    }
    auto q = quota_sizes(members.size(), ratios, true);
    append_pairs(out[0], ddi, {members.begin(), members.begin() + q[0]});
    append_pairs(out[1], ddi, {members.begin() + q[0], members.begin() + q[0] + q[1]});
    append_pairs(out[2], ddi, {members.begin() + q[0] + q[1], members.end()});
  }
  return out;
}

}  // namespace kgddi::graph
