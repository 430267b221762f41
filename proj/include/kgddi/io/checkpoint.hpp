#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/model/params.hpp"
#include "kgddi/tensor/tensor.hpp"

namespace kgddi::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Self-describing training snapshot. The binary layout is: an 8-byte magic,
// the version, task metadata, the config snapshot text, the entity and
// relation name tables of the propagation graph, length-prefixed named
// tensors as little-endian 64-bit floats in registry order, the optional
// optimizer moments, then a checksum and closing magic. Saving the result of
// a load reproduces the input bytes exactly.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  graph::TaskMode task_mode = graph::TaskMode::MultiClass;
  std::uint64_t num_classes = 0;
  std::uint64_t ddi_base = 0;
  std::uint64_t best_epoch = 0;
  double best_val_loss = 0.0;
  std::string config_text;

  std::vector<std::string> entity_names;
  std::vector<std::string> relation_names;  // interaction block included
  std::vector<std::pair<std::string, tensor::Tensor>> tensors;

  bool has_optimizer = false;
  std::uint64_t adam_step = 0;
  std::vector<std::vector<double>> adam_m;  // positional, aligned with tensors
  std::vector<std::vector<double>> adam_v;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);

// Verifies the closing magic and checksum before parsing, so a truncated or
// corrupted file raises an integrity error instead of loading partially.
// Refuses versions this build does not read.
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint tensors into params by registry name. Every parameter
// must be present with a matching shape and no checkpoint tensor may be left
// over; params keeps requires_grad untouched (init leaves it set).
void restore_model_params(const Checkpoint& ck, model::ModelParams& params);

}  // namespace kgddi::io
