#include "kgddi/io/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgddi/error.hpp"
#include "kgddi/rng.hpp"

namespace kgddi::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write ", path);
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  require(out.good(), "write failed for ", path);
}

}  // namespace

SynthPaths gen_synth(const SynthSpec& spec, const std::string& out_dir) {
  const std::size_t n = spec.num_drugs;
  const std::size_t g = spec.num_genes;
  const std::size_t C = spec.num_classes;
  const std::size_t s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(C))));
  require(C >= 2 && s * s == C, "synth: class count ", C, " is not a perfect square >= 4");
  require(n >= 2, "synth: need at least 2 drugs, got ", n);
  const std::size_t pairs = spec.num_pairs == 0 ? 2 * n : spec.num_pairs;
  require(pairs <= n * (n - 1) / 2, "synth: ", pairs, " pairs exceed the ", n * (n - 1) / 2,
          " distinct pairs available over ", n, " drugs");
  require(g >= pairs, "synth: need one anchor gene per pair, have ", g, " genes for ", pairs,
          " pairs");
  require(spec.noise_edges == 0 || g >= 2, "synth: gene-gene noise edges need at least 2 genes");
  require(spec.fingerprint_bits >= 1, "synth: fingerprint width must be positive");

  std::mt19937_64 rng = make_rng(spec.seed);

  // Draw distinct unordered drug pairs, keeping the drawn orientation. The
  // orientation decides which motif factor each endpoint carries, so (u, v)
  // and (v, u) would be different examples; distinctness is unordered anyway
  // because the interaction dataset treats pairs symmetrically.
  std::vector<std::pair<std::size_t, std::size_t>> pair_list;
  std::unordered_set<std::uint64_t> seen;
  pair_list.reserve(pairs);
  while (pair_list.size() < pairs) {
    std::size_t u = uniform_index(rng, n);
    std::size_t v = uniform_index(rng, n);
    if (u == v) continue;
    std::uint64_t key = u < v ? static_cast<std::uint64_t>(u) * n + v
                              : static_cast<std::uint64_t>(v) * n + u;
    if (!seen.insert(key).second) continue;
    pair_list.emplace_back(u, v);
  }

  // One label draw per pair, decomposed into the motif factor grid.
  std::vector<std::size_t> label_of(pairs);
  for (std::size_t p = 0; p < pairs; ++p) label_of[p] = uniform_index(rng, C);

  // Anchor genes are a prefix of a shuffled gene list, so every pair owns a
  // distinct anchor and no anchor carries motif edges from any other pair.
  std::vector<std::size_t> gene_order(g);
  for (std::size_t i = 0; i < g; ++i) gene_order[i] = i;
  for (std::size_t i = g; i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(gene_order[i - 1], gene_order[j]);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, "cannot create directory ", out_dir, ": ", ec.message());

  SynthPaths paths;
  paths.kg_file = out_dir + "/kg.tsv";
  paths.ddi_file = out_dir + "/ddi.tsv";
  paths.fingerprint_file = out_dir + "/fingerprints.tsv";
  paths.truth_file = out_dir + "/truth.tsv";

  auto drug_name = [](std::size_t i) { return "drug:" + std::to_string(i); };
  auto gene_name = [](std::size_t j) { return "gene:" + std::to_string(j); };

  std::ofstream kg = open_out(paths.kg_file);
  std::ofstream truth = open_out(paths.truth_file);
  for (std::size_t p = 0; p < pairs; ++p) {
    auto [u, v] = pair_list[p];
    std::size_t anchor = gene_order[p];
    std::size_t a = label_of[p] / s;
    std::size_t b = label_of[p] % s;
    kg << drug_name(u) << '\t' << "motif:" << a << '\t' << gene_name(anchor) << '\n';
    kg << drug_name(v) << '\t' << "motif:" << b << '\t' << gene_name(anchor) << '\n';
    truth << drug_name(u) << '\t' << drug_name(v) << '\t' << a << '\t' << b << '\t' << label_of[p]
          << '\n';
  }
  close_out(truth, paths.truth_file);

  // Background edges use a relation family disjoint from the motifs, so they
  // add connectivity without leaking label information.
  constexpr std::size_t kBackgroundRelations = 4;
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t e = 0; e < spec.edges_per_drug; ++e) {
      std::size_t target = uniform_index(rng, g);
      std::size_t rel = uniform_index(rng, kBackgroundRelations);
      kg << drug_name(d) << '\t' << "bg:" << rel << '\t' << gene_name(target) << '\n';
    }
  }
  for (std::size_t e = 0; e < spec.noise_edges; ++e) {
    std::size_t i = uniform_index(rng, g);
    std::size_t j = uniform_index(rng, g);
    while (j == i) j = uniform_index(rng, g);
    std::size_t rel = uniform_index(rng, kBackgroundRelations);
    kg << gene_name(i) << '\t' << "bg:" << rel << '\t' << gene_name(j) << '\n';
  }
  close_out(kg, paths.kg_file);

  std::ofstream ddi = open_out(paths.ddi_file);
  for (std::size_t p = 0; p < pairs; ++p) {
    auto [u, v] = pair_list[p];
    ddi << drug_name(u) << '\t' << drug_name(v) << '\t' << label_of[p] << '\n';
  }
  close_out(ddi, paths.ddi_file);

  // Fingerprints are pure coin flips: any model relying on them alone should
  // sit at chance level on this dataset.
  std::ofstream fp = open_out(paths.fingerprint_file);
  std::string bits(spec.fingerprint_bits, '0');
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < spec.fingerprint_bits; ++i)
      bits[i] = (rng() & 1ULL) ? '1' : '0';
    fp << drug_name(d) << '\t' << bits << '\n';
  }
  close_out(fp, paths.fingerprint_file);

  return paths;
}

}  // namespace kgddi::io
