#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/graph/loaders.hpp"
#include "kgddi/model/config.hpp"
#include "kgddi/model/params.hpp"
#include "kgddi/train/train.hpp"

namespace kgddi::train {

// Scored evaluation example. Multi-class records carry softmax probabilities
// and the argmax class; multi-label records carry per-relation sigmoids plus,
// for each positive label, the fixed corrupted tail and its sigmoid at that
// label.
struct PredictionRecord {
  graph::DDIPair pair;
  std::vector<double> logits;  // one per interaction relation
  std::vector<double> scores;  // softmax probabilities or sigmoids
  std::uint32_t predicted = 0;               // multi-class: argmax, lowest id on ties
  std::vector<graph::EntityId> negative_tails;  // multi-label, parallel to pair.labels
  std::vector<double> negative_scores;          // sigmoid of the negative at that label
};

// Scores every pair of the dataset in inference mode. Multi-label mode
// requires the split's fixed negatives (parallel to the dataset); pass
// nullptr in multi-class mode.
std::vector<PredictionRecord> predict(const graph::KnowledgeGraph& prop,
                                      graph::RelationId ddi_base, const graph::DDIDataset& ds,
                                      model::ModelParams& params, const model::ModelConfig& cfg,
                                      const graph::FingerprintTable& fingerprints,
                                      graph::TaskMode mode,
                                      const std::vector<PairNegatives>* negatives);

// Index of the largest value; exact ties resolve to the lowest index. This is
// the multi-class decision rule, so it is unaffected by any constant shift of
// the whole vector.
std::size_t argmax_lowest(const std::vector<double>& values);

// Label-level metrics. `truth` and `pred` are class ids per example.
double accuracy(const std::vector<std::uint32_t>& truth, const std::vector<std::uint32_t>& pred);
std::vector<double> per_class_f1(const std::vector<std::uint32_t>& truth,
                                 const std::vector<std::uint32_t>& pred, std::size_t num_classes);
// Mean F1 over all classes; a class with zero precision and recall counts 0.
double macro_f1(const std::vector<std::uint32_t>& truth, const std::vector<std::uint32_t>& pred,
                std::size_t num_classes);
// Agreement beyond chance: (p_o - p_e) / (1 - p_e) with p_e from the
// marginal distributions of truth and prediction.
double cohens_kappa(const std::vector<std::uint32_t>& truth,
                    const std::vector<std::uint32_t>& pred, std::size_t num_classes);

// Score-level metrics over binary ground truth (nonzero = positive).
// roc_auc is the rank statistic: tied scores contribute half weight, so it
// equals exhaustive concordant-pair counting exactly. Both classes required.
double roc_auc(const std::vector<double>& scores, const std::vector<char>& truth);
// Area under the precision-recall curve by step integration over the
// distinct score thresholds. At least one positive required.
double pr_auc(const std::vector<double>& scores, const std::vector<char>& truth);
// Precision among the k highest-scored items (ties broken by input order);
// fewer than k items leaves the divisor at k. With exact_ap set, computes
// standard average precision over all thresholds instead.
double ap_at_k(const std::vector<double>& scores, const std::vector<char>& truth,
               std::size_t k = 50, bool exact_ap = false);

struct MetricsReport {
  graph::TaskMode mode = graph::TaskMode::MultiClass;
  // multi-class
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double kappa = 0.0;
  // multi-label, averaged over relation types with at least one positive
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double ap_at_50 = 0.0;
  // per relation: positives observed in the records, and the per-type value
  // (F1 in multi-class, ROC-AUC in multi-label; 0 when the type has no
  // positives in the evaluated records)
  std::vector<std::size_t> support;
  std::vector<double> per_relation;
};

MetricsReport evaluate(const std::vector<PredictionRecord>& records, std::uint32_t num_classes,
                       graph::TaskMode mode);

// Per-type metric averaged within training-frequency bins. Edges must be
// strictly increasing; bins are [e0,e1), ..., [e_last, inf). Bins holding no
// relation are omitted rather than reported as zero.
struct SupportBin {
  std::size_t lo = 0;
  std::size_t hi = 0;  // exclusive; SIZE_MAX marks the open top bin
  std::size_t relation_count = 0;
  double mean_value = 0.0;
};

std::vector<SupportBin> relation_bin_analysis(const std::vector<double>& per_relation_value,
                                              const std::vector<std::size_t>& train_counts,
                                              const std::vector<std::size_t>& bin_edges = {
                                                  0, 10, 50, 200, 1000});

// Record-level form: bins the per-class F1 of multi-class records. A single
// bin covering every class therefore averages to the macro F1.
std::vector<SupportBin> relation_bin_analysis(const std::vector<PredictionRecord>& records,
                                              std::uint32_t num_classes,
                                              const std::vector<std::size_t>& train_counts,
                                              const std::vector<std::size_t>& bin_edges = {
                                                  0, 10, 50, 200, 1000});

}  // namespace kgddi::train
