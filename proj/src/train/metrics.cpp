#include "kgddi/train/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail.hpp"
#include "kgddi/error.hpp"
#include "kgddi/model/model.hpp"

namespace kgddi::train {

namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void check_labelled(const std::vector<std::uint32_t>& truth, const std::vector<std::uint32_t>& pred,
                    std::size_t num_classes, const char* what) {
  require(!truth.empty(), what, ": no examples");
  require(truth.size() == pred.size(), what, ": ", truth.size(), " truth labels vs ",
          pred.size(), " predictions");
  require(num_classes >= 1, what, ": need at least one class");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] < num_classes, what, ": truth label ", truth[i], " out of range");
    require(pred[i] < num_classes, what, ": predicted label ", pred[i], " out of range");
  }
}

void check_scored(const std::vector<double>& scores, const std::vector<char>& truth,
                  const char* what) {
  require(!scores.empty(), what, ": no examples");
  require(scores.size() == truth.size(), what, ": ", scores.size(), " scores vs ", truth.size(),
          " labels");
}

std::size_t count_positives(const std::vector<char>& truth) {
  std::size_t p = 0;
  for (char t : truth) p += t != 0;
  return p;
}

// Indices ordered by score descending, input order within ties.
std::vector<std::size_t> rank_order(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// Step integral of precision over recall across distinct score thresholds.
double step_pr_area(const std::vector<double>& scores, const std::vector<char>& truth,
                    std::size_t positives) {
  std::vector<std::size_t> idx = rank_order(scores);
  double area = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      if (truth[idx[j]]) ++tp;
      else ++fp;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

}  // namespace

std::vector<PredictionRecord> predict(const graph::KnowledgeGraph& prop,
                                      graph::RelationId ddi_base, const graph::DDIDataset& ds,
                                      model::ModelParams& params, const model::ModelConfig& cfg,
                                      const graph::FingerprintTable& fingerprints,
                                      graph::TaskMode mode,
                                      const std::vector<PairNegatives>* negatives) {
  detail::check_dataset(ds, cfg.num_ddi_relations, mode, "predict");
  const bool multilabel = mode == graph::TaskMode::MultiLabel;
  if (multilabel) {
    require(negatives != nullptr && negatives->size() == ds.pairs.size(),
            "multi-label prediction needs one fixed negative per positive edge");
  }

  std::vector<PredictionRecord> records;
  records.reserve(ds.pairs.size());
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    const graph::DDIPair& pair = ds.pairs[i];
    graph::EnclosingSubgraph sg = detail::extract_pair(prop, pair, cfg.k, ddi_base);
    tensor::Tensor logits = model::forward_infer(sg, params, cfg, fingerprints);

    PredictionRecord rec;
    rec.pair = pair;
    rec.logits.assign(logits.data(), logits.data() + logits.cols());
    rec.scores.resize(logits.cols());

    if (!multilabel) {
      // stabilized softmax over the max logit
      const std::size_t arg = argmax_lowest(rec.logits);
      const double mx = rec.logits[arg];
      double sum = 0.0;
      for (std::size_t j = 0; j < rec.logits.size(); ++j) {
        rec.scores[j] = std::exp(rec.logits[j] - mx);
        sum += rec.scores[j];
      }
      for (double& s : rec.scores) s /= sum;
      rec.predicted = static_cast<std::uint32_t>(arg);
    } else {
      for (std::size_t j = 0; j < rec.logits.size(); ++j) rec.scores[j] = sigmoid(rec.logits[j]);
      const PairNegatives& pn = (*negatives)[i];
      require(pn.tails.size() == pair.labels.size(), "pair (", pair.u, ", ", pair.v, "): ",
              pn.tails.size(), " negatives for ", pair.labels.size(), " labels");
      rec.negative_tails = pn.tails;
      rec.negative_scores.reserve(pn.tails.size());
      for (std::size_t j = 0; j < pn.tails.size(); ++j) {
        graph::EnclosingSubgraph neg_sg =
            graph::extract_enclosing_subgraph(prop, pair.u, pn.tails[j], cfg.k);
        tensor::Tensor neg_logits = model::forward_infer(neg_sg, params, cfg, fingerprints);
        rec.negative_scores.push_back(sigmoid(neg_logits.at(0, pair.labels[j])));
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::size_t argmax_lowest(const std::vector<double>& values) {
  require(!values.empty(), "argmax_lowest: empty vector");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[arg]) arg = i;
  return arg;
}

double accuracy(const std::vector<std::uint32_t>& truth, const std::vector<std::uint32_t>& pred) {
  require(!truth.empty(), "accuracy: no examples");
  require(truth.size() == pred.size(), "accuracy: ", truth.size(), " truth labels vs ",
          pred.size(), " predictions");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<double> per_class_f1(const std::vector<std::uint32_t>& truth,
                                 const std::vector<std::uint32_t>& pred, std::size_t num_classes) {
  check_labelled(truth, pred, num_classes, "per_class_f1");
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) {
      ++tp[truth[i]];
    } else {
      ++fn[truth[i]];
      ++fp[pred[i]];
    }
  }
  std::vector<double> f1(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double p = tp[c] + fp[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fp[c]) : 0.0;
    const double r = tp[c] + fn[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fn[c]) : 0.0;
    f1[c] = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return f1;
}

double macro_f1(const std::vector<std::uint32_t>& truth, const std::vector<std::uint32_t>& pred,
                std::size_t num_classes) {
  std::vector<double> f1 = per_class_f1(truth, pred, num_classes);
  double sum = 0.0;
  for (double v : f1) sum += v;
  return sum / static_cast<double>(num_classes);
}

double cohens_kappa(const std::vector<std::uint32_t>& truth,
                    const std::vector<std::uint32_t>& pred, std::size_t num_classes) {
  check_labelled(truth, pred, num_classes, "cohens_kappa");
  std::vector<double> row(num_classes, 0.0), col(num_classes, 0.0);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    row[truth[i]] += 1.0;
    col[pred[i]] += 1.0;
    agree += truth[i] == pred[i];
  }
  const double n = static_cast<double>(truth.size());
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) p_e += (row[c] / n) * (col[c] / n);
  // p_e can only reach 1 when both marginals are the same point mass, which
  // forces perfect agreement
  if (p_e >= 1.0 - 1e-15) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

double roc_auc(const std::vector<double>& scores, const std::vector<char>& truth) {
  check_scored(scores, truth, "roc_auc");
  const std::size_t p = count_positives(truth);
  const std::size_t n = truth.size() - p;
  require(p > 0 && n > 0, "roc_auc: needs at least one positive and one negative");

  // Mann-Whitney U from average ranks; tied scores share their mean rank, so
  // each tied positive-negative pair contributes exactly one half.
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    // 1-based ranks i+1 .. j averaged over the tie group
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (truth[idx[t]]) rank_sum_pos += avg_rank;
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(p) * static_cast<double>(p + 1);
  return u / (static_cast<double>(p) * static_cast<double>(n));
}

double pr_auc(const std::vector<double>& scores, const std::vector<char>& truth) {
  check_scored(scores, truth, "pr_auc");
  const std::size_t p = count_positives(truth);
  require(p > 0, "pr_auc: needs at least one positive");
  return step_pr_area(scores, truth, p);
}

double ap_at_k(const std::vector<double>& scores, const std::vector<char>& truth, std::size_t k,
               bool exact_ap) {
  check_scored(scores, truth, exact_ap ? "average_precision" : "ap_at_k");
  if (exact_ap) {
    const std::size_t p = count_positives(truth);
    require(p > 0, "average_precision: needs at least one positive");
    return step_pr_area(scores, truth, p);
  }
  require(k >= 1, "ap_at_k: k must be positive");
  std::vector<std::size_t> idx = rank_order(scores);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, idx.size()); ++i) hits += truth[idx[i]] != 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

MetricsReport evaluate(const std::vector<PredictionRecord>& records, std::uint32_t num_classes,
                       graph::TaskMode mode) {
  require(!records.empty(), "evaluate: no records");
  require(num_classes >= 1, "evaluate: need at least one class");

  MetricsReport report;
  report.mode = mode;
  report.support.assign(num_classes, 0);
  report.per_relation.assign(num_classes, 0.0);

  if (mode == graph::TaskMode::MultiClass) {
    std::vector<std::uint32_t> truth, pred;
    truth.reserve(records.size());
    pred.reserve(records.size());
    for (const PredictionRecord& r : records) {
      require(r.pair.labels.size() == 1, "evaluate: pair (", r.pair.u, ", ", r.pair.v,
              ") carries ", r.pair.labels.size(), " labels");
      truth.push_back(r.pair.labels[0]);
      pred.push_back(r.predicted);
    }
    report.per_relation = per_class_f1(truth, pred, num_classes);
    double sum = 0.0;
    for (double v : report.per_relation) sum += v;
    report.macro_f1 = sum / static_cast<double>(num_classes);
    report.accuracy = accuracy(truth, pred);
    report.kappa = cohens_kappa(truth, pred, num_classes);
    for (std::uint32_t t : truth) ++report.support[t];
    return report;
  }

  // multi-label: each relation type scores its positives against their fixed
  // corrupted counterparts, then the per-type metrics are averaged over the
  // types that actually appear
  double roc_sum = 0.0, pr_sum = 0.0, ap_sum = 0.0;
  std::size_t scored_types = 0;
  for (std::uint32_t c = 0; c < num_classes; ++c) {
    std::vector<double> scores;
    std::vector<char> truth;
    for (const PredictionRecord& r : records) {
      require(r.negative_scores.size() == r.pair.labels.size(), "evaluate: pair (", r.pair.u,
              ", ", r.pair.v, ") has ", r.negative_scores.size(), " negative scores for ",
              r.pair.labels.size(), " labels");
      for (std::size_t j = 0; j < r.pair.labels.size(); ++j) {
        if (r.pair.labels[j] != c) continue;
        require(c < r.scores.size(), "evaluate: record scores narrower than class count");
        scores.push_back(r.scores[c]);
        truth.push_back(1);
        scores.push_back(r.negative_scores[j]);
        truth.push_back(0);
      }
    }
    report.support[c] = count_positives(truth);
    if (truth.empty()) continue;
    report.per_relation[c] = roc_auc(scores, truth);
    roc_sum += report.per_relation[c];
    pr_sum += pr_auc(scores, truth);
    ap_sum += ap_at_k(scores, truth);
    ++scored_types;
  }
  require(scored_types > 0, "evaluate: no relation type has a positive example");
  report.roc_auc = roc_sum / static_cast<double>(scored_types);
  report.pr_auc = pr_sum / static_cast<double>(scored_types);
  report.ap_at_50 = ap_sum / static_cast<double>(scored_types);
  return report;
}

std::vector<SupportBin> relation_bin_analysis(const std::vector<double>& per_relation_value,
                                              const std::vector<std::size_t>& train_counts,
                                              const std::vector<std::size_t>& bin_edges) {
  require(per_relation_value.size() == train_counts.size(), "relation_bin_analysis: ",
          per_relation_value.size(), " values vs ", train_counts.size(), " train counts");
  require(!bin_edges.empty(), "relation_bin_analysis: no bin edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i)
    require(bin_edges[i - 1] < bin_edges[i], "relation_bin_analysis: bin edges must increase");

  const std::size_t nbins = bin_edges.size();
  std::vector<double> sums(nbins, 0.0);
  std::vector<std::size_t> counts(nbins, 0);
  for (std::size_t c = 0; c < train_counts.size(); ++c) {
    if (train_counts[c] < bin_edges[0]) continue;  // below the first edge, no bin
    std::size_t b = nbins - 1;
    while (train_counts[c] < bin_edges[b]) --b;
    sums[b] += per_relation_value[c];
    ++counts[b];
  }

  std::vector<SupportBin> rows;
  for (std::size_t b = 0; b < nbins; ++b) {
    if (counts[b] == 0) continue;
    SupportBin row;
    row.lo = bin_edges[b];
    row.hi = b + 1 < nbins ? bin_edges[b + 1] : SIZE_MAX;
    row.relation_count = counts[b];
    row.mean_value = sums[b] / static_cast<double>(counts[b]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SupportBin> relation_bin_analysis(const std::vector<PredictionRecord>& records,
                                              std::uint32_t num_classes,
                                              const std::vector<std::size_t>& train_counts,
                                              const std::vector<std::size_t>& bin_edges) {
  require(!records.empty(), "relation_bin_analysis: no records");
  std::vector<std::uint32_t> truth, pred;
  truth.reserve(records.size());
  pred.reserve(records.size());
  for (const PredictionRecord& r : records) {
    require(r.pair.labels.size() == 1, "relation_bin_analysis: pair (", r.pair.u, ", ",
            r.pair.v, ") carries ", r.pair.labels.size(), " labels");
    truth.push_back(r.pair.labels[0]);
    pred.push_back(r.predicted);
  }
  return relation_bin_analysis(per_class_f1(truth, pred, num_classes), train_counts, bin_edges);
}

}  // namespace kgddi::train
