#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kgddi/io/run_config.hpp"

namespace kgddi::io {

// Command bodies behind the CLI subcommands. Each throws Error on bad input
// or unwritable output and writes progress to `log`; output files never carry
// timestamps, so identical inputs and seeds give identical artifacts.

// Trains on the configured dataset and writes history.csv, entity_ids.tsv,
// relation_ids.tsv, and model.ckpt into cfg.out_dir (created if absent).
void cmd_train(const RunConfig& cfg, std::ostream& log);

struct EvalOptions {
  std::string checkpoint_path;
  std::string split = "test";  // train, dev, or test
  std::string task;            // empty accepts the checkpoint's task mode
  std::string out_dir;         // empty writes next to the checkpoint
};

// Rebuilds the graph from the checkpoint's config snapshot, scores the
// requested split, and writes metrics.csv, per_relation.csv, and
// relation_bins.csv.
void cmd_eval(const EvalOptions& opt, std::ostream& log);

struct ExplainOptions {
  std::string checkpoint_path;
  std::string drug_u;
  std::string drug_v;
  std::optional<double> gamma;   // overrides the trained pruning threshold
  bool merge_antiparallel = false;
  std::string out_dir;           // empty writes next to the checkpoint
};

// Predicts the pair's interaction, logs the label with its probability, and
// writes the pruned reasoning pathway as DOT and JSON.
void cmd_explain(const ExplainOptions& opt, std::ostream& log);

// One full train plus eval per value, every other hyperparameter at the
// config's setting; run artifacts land in per-value directories under
// cfg.out_dir next to the collected sweep.csv. axis is one of k, d, gamma.
void cmd_sweep(const RunConfig& cfg, const std::string& axis,
               const std::vector<double>& values, std::ostream& log);

struct BenchOptions {
  std::vector<std::uint32_t> k_values = {1, 2};
  bool include_full_graph = true;
  // A full-graph forward visits every triplet per example, so only this many
  // pairs are actually timed; the edge counter stays exact either way.
  std::size_t full_graph_pairs_timed = 8;
};

// Counts propagation edges touched per training epoch at each k, times one
// epoch-equivalent of forward passes, and writes bench.csv. The edge counts
// are exact integers; only the wall-seconds column varies between runs.
void cmd_bench(const RunConfig& cfg, const BenchOptions& opt, std::ostream& log);

// Prints checkpoint metadata, the tensor table, and the config snapshot.
void cmd_inspect(const std::string& checkpoint_path, std::ostream& log);

}  // namespace kgddi::io
