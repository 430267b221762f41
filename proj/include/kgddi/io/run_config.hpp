#pragma once

#include <cstdint>
#include <string>

#include "kgddi/graph/propagation.hpp"
#include "kgddi/model/config.hpp"
#include "kgddi/train/train.hpp"

namespace kgddi::io {

// Everything one command run needs: input paths, the split policy, the model
// and training hyperparameters, and the embedding-pretraining knobs. The
// ablation switches live inside ModelConfig; the `ablation.*` config keys and
// the --ablation flags clear them.
struct RunConfig {
  std::string kg_file;
  std::string ddi_file;
  std::string fingerprint_file;  // optional; empty means no fingerprints on disk
  std::string out_dir = "out";

  graph::SplitRatios split;
  bool stratified = true;
  std::uint64_t split_seed = 1;

  model::ModelConfig model;
  train::TrainConfig train;

  // Translation pretraining of the entity table; 0 epochs skips it.
  std::size_t pretrain_epochs = 0;
  double pretrain_margin = 4.0;
  double pretrain_lr = 0.01;
};

// Applies one `section.key = value` assignment. Unknown keys and malformed
// values error with `context` in the message. See serialize_run_config for
// the full key list.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value,
                     const std::string& context);

// Flat key=value text: one assignment per line, `#` comments and blank lines
// skipped. Later assignments override earlier ones.
RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

// Canonical text holding every key in a fixed order; parsing it back yields
// an equal config, and equal configs serialize to identical bytes.
std::string serialize_run_config(const RunConfig& cfg);

// Task-mode spelling used by the config format and the CLI flags.
graph::TaskMode parse_task_mode(const std::string& value, const std::string& context);
const char* task_mode_name(graph::TaskMode mode);

}  // namespace kgddi::io
