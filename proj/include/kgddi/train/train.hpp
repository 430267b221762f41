#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/graph/loaders.hpp"
#include "kgddi/graph/sampling.hpp"
#include "kgddi/model/config.hpp"
#include "kgddi/model/params.hpp"

namespace kgddi::train {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 256;
  double lr = 5e-3;
  double weight_decay = 1e-5;  // coupled L2 through the optimizer
  double clip_norm = 10.0;     // global gradient norm cap per batch
  graph::TaskMode task_mode = graph::TaskMode::MultiClass;
  std::uint64_t seed = 1;
  std::size_t threads = 1;  // forwards may run in parallel; reductions stay serial

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch;  // 1-based
  double train_loss;  // per-edge average over the epoch's training batches
  double val_loss;    // per-edge average on the dev split, dropout off
};

struct FitResult {
  model::ModelParams params;  // snapshot from the epoch with the lowest val loss
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based, earliest epoch on ties
  double best_val_loss = 0.0;

  // Optimizer state at the snapshot epoch, positional over params.tensors();
  // lets a checkpoint carry enough to continue training from the snapshot.
  std::uint64_t adam_step = 0;
  std::vector<std::vector<double>> adam_m;
  std::vector<std::vector<double>> adam_v;
};

// Fixed corrupted tails for a multi-label split: one tail per positive label
// of each pair, drawn degree^(3/4)-proportionally while skipping known
// positives. Drawn from a single stream over pairs in dataset order, so the
// same (dataset, seed) always yields the same counterparts.
struct PairNegatives {
  std::vector<graph::EntityId> tails;  // parallel to the pair's labels
};

std::vector<PairNegatives> sample_eval_negatives(const graph::KnowledgeGraph& prop,
                                                 const graph::DDIDataset& ds,
                                                 const graph::TripletSet& known_positives,
                                                 std::uint64_t seed);

// Sum of per-edge losses over every (pair, label) edge of the dataset,
// evaluated in inference mode (dropout off). Each pair's subgraph is
// extracted with its own interaction edges excluded, so a pair listed twice
// contributes exactly twice. Multi-label mode scores each positive against
// the supplied fixed negative (required, parallel to the dataset); pass
// nullptr in multi-class mode. Errors on an empty dataset.
double total_loss(const graph::KnowledgeGraph& prop, graph::RelationId ddi_base,
                  const graph::DDIDataset& ds, model::ModelParams& params,
                  const model::ModelConfig& cfg, const graph::FingerprintTable& fingerprints,
                  graph::TaskMode mode, const std::vector<PairNegatives>* negatives);

// Trains on the train split, tracking per-epoch train and dev loss, and
// returns the parameter snapshot from the epoch with the lowest dev loss.
//
// Determinism contract: with a fixed seed the run is bitwise reproducible.
// Example-level randomness (dropout draws, corrupted tails) comes from a
// stream derived from (seed, epoch, edge id), never from thread scheduling;
// gradients are folded and batches applied in a fixed order regardless of
// the thread count.
//
// When pretrained_entities is given, its values replace the random entity
// embedding before the first epoch (shape must match).
FitResult fit(const graph::KnowledgeGraph& prop, graph::RelationId ddi_base,
              const graph::DDIDataset& train_split, const graph::DDIDataset& dev_split,
              const model::ModelConfig& mcfg, const TrainConfig& tcfg,
              const graph::FingerprintTable& fingerprints,
              const tensor::Tensor* pretrained_entities = nullptr);

}  // namespace kgddi::train
