#pragma once

#include <cstdint>
#include <string>

namespace kgddi::io {

// Generator recipe for a desk-scale dataset whose interaction labels are a
// deterministic function of 2-hop graph structure. Every interaction pair
// (u, v) gets a private anchor gene g and two motif triplets (u, motif:a, g)
// and (v, motif:b, g); the label is a * sqrt(C) + b. Anchor genes carry no
// other motif edges, so the label is exactly readable from the pair's 2-hop
// enclosing subgraph and from nothing else: fingerprints are random bits and
// background edges use a disjoint relation set.
struct SynthSpec {
  std::size_t num_drugs = 500;
  std::size_t num_genes = 2000;
  std::size_t num_classes = 4;     // C; must be a perfect square >= 4
  std::size_t edges_per_drug = 3;  // background (drug, bg:*, gene) triplets per drug
  std::size_t num_pairs = 0;       // interaction pairs; 0 picks 2 * num_drugs
  std::size_t noise_edges = 0;     // random gene-gene triplets
  std::size_t fingerprint_bits = 64;
  std::uint64_t seed = 1;
};

struct SynthPaths {
  std::string kg_file;
  std::string ddi_file;
  std::string fingerprint_file;
  std::string truth_file;  // drug_u, drug_v, a, b, label per pair
};

// Writes kg.tsv, ddi.tsv, fingerprints.tsv, and truth.tsv into out_dir
// (created if absent). The same spec always produces byte-identical files.
SynthPaths gen_synth(const SynthSpec& spec, const std::string& out_dir);

}  // namespace kgddi::io
