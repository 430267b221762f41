#include "kgddi/io/commands.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "../train/detail.hpp"
#include "kgddi/error.hpp"
#include "kgddi/explain/pathway.hpp"
#include "kgddi/graph/loaders.hpp"
#include "kgddi/graph/propagation.hpp"
#include "kgddi/graph/subgraph.hpp"
#include "kgddi/io/checkpoint.hpp"
#include "kgddi/io/csv.hpp"
#include "kgddi/model/model.hpp"
#include "kgddi/model/transe.hpp"
#include "kgddi/rng.hpp"
#include "kgddi/train/metrics.hpp"
#include "kgddi/train/train.hpp"

namespace kgddi::io {

namespace {

constexpr std::uint64_t kPretrainSalt = 0x70726574u;  // entity-table pretraining
constexpr std::uint64_t kEvalNegSalt = 0x6576616cu;   // fixed eval-split negatives

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, "cannot create directory ", dir, ": ", ec.message());
}

void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write ", path);
  CsvWriter writer(out);
  for (const auto& row : rows) writer.row(row);
  out.flush();
  require(out.good(), "write failed for ", path);
}

void write_names_tsv(const std::string& path, const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write ", path);
  for (std::size_t id = 0; id < names.size(); ++id) out << id << '\t' << names[id] << '\n';
  out.flush();
  require(out.good(), "write failed for ", path);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Inputs one command run works from: vocabulary, interaction splits, the
// propagation graph, and fingerprints, derived from the config exactly once
// so training, evaluation, and explanation all see the same view.
struct DataBundle {
  graph::Vocab entities;
  graph::DDIDataset full;
  std::array<graph::DDIDataset, 3> splits;  // train, dev, test
  graph::PropagationResult prop;
  graph::FingerprintTable fingerprints;
};

DataBundle load_bundle(const RunConfig& cfg, std::ostream& log) {
  require(!cfg.kg_file.empty(), "config: data.kg_file not set");
  require(!cfg.ddi_file.empty(), "config: data.ddi_file not set");
  graph::Vocab entities, relations;
  std::vector<graph::Triplet> triplets = graph::load_kg_triplets(cfg.kg_file, entities, relations);
  graph::DDIDataset ddi = graph::load_ddi(cfg.ddi_file, cfg.train.task_mode, entities);
  // The no-kg ablation drops every KG fact from message passing but keeps the
  // entity and relation tables, so id maps stay stable across ablations.
  if (!cfg.model.use_kg) triplets.clear();
  graph::KnowledgeGraph kg(entities.size(), relations.size(), std::move(triplets),
                           entities.names(), relations.names());
  std::array<graph::DDIDataset, 3> splits =
      graph::split_dataset(ddi, cfg.split, cfg.stratified, cfg.split_seed);
  graph::PropagationResult prop =
      graph::build_propagation_graph(kg, splits[0], splits[1], splits[2], ddi.num_classes);

  graph::FingerprintTable fingerprints;
  if (!cfg.fingerprint_file.empty()) {
    fingerprints = graph::load_fingerprints(cfg.fingerprint_file, entities);
    std::unordered_set<graph::EntityId> drugs;
    for (const auto& pair : ddi.pairs) {
      drugs.insert(pair.u);
      drugs.insert(pair.v);
    }
    std::size_t missing = 0;
    for (graph::EntityId d : drugs) missing += fingerprints.has(d) ? 0 : 1;
    if (missing > 0)
      log << missing << " of " << drugs.size()
          << " interaction drugs have no fingerprint row, zeros substituted\n";
  }

  log << "data: " << kg.num_entities() << " entities, " << prop.graph.num_relations()
      << " relations, " << prop.graph.triplets().size() << " propagation triplets; "
      << ddi.pairs.size() << " pairs over " << ddi.num_classes << " classes, split "
      << splits[0].pairs.size() << "/" << splits[1].pairs.size() << "/"
      << splits[2].pairs.size() << "\n";
  return {std::move(entities), std::move(ddi), std::move(splits), std::move(prop),
          std::move(fingerprints)};
}

// Fills in the data-dependent model fields: the decoder width and the
// fingerprint block. A missing fingerprint file disables the block (an
// all-zero feature carries nothing); a present file dictates its width.
model::ModelConfig resolve_model(const RunConfig& cfg, const DataBundle& data,
                                 std::ostream& log) {
  model::ModelConfig mcfg = cfg.model;
  mcfg.num_ddi_relations = data.full.num_classes;
  if (mcfg.use_fingerprint) {
    if (cfg.fingerprint_file.empty()) {
      mcfg.use_fingerprint = false;
      log << "no fingerprint file configured, fingerprint feature block disabled\n";
    } else {
      if (mcfg.fingerprint_bits != data.fingerprints.width)
        log << "fingerprint width " << data.fingerprints.width << " from "
            << cfg.fingerprint_file << " overrides configured " << mcfg.fingerprint_bits << "\n";
      mcfg.fingerprint_bits = data.fingerprints.width;
    }
  }
  return mcfg;
}

struct TrainOutcome {
  DataBundle data;
  model::ModelConfig mcfg;
  train::FitResult fit;
  std::string checkpoint_path;
};

// Shared by cmd_train and cmd_sweep so a sweep cell and a direct training run
// write byte-identical artifacts for the same configuration.
TrainOutcome run_training(const RunConfig& cfg, std::ostream& log) {
  cfg.train.validate();
  DataBundle data = load_bundle(cfg, log);
  model::ModelConfig mcfg = resolve_model(cfg, data, log);

  tensor::Tensor pretrained_entities;
  const tensor::Tensor* pretrained = nullptr;
  if (cfg.pretrain_epochs > 0 && !data.prop.graph.triplets().empty()) {
    pretrained_entities = model::transe_pretrain(
        data.prop.graph, mcfg.d, cfg.pretrain_epochs, cfg.pretrain_margin, cfg.pretrain_lr,
        mix_seed(cfg.train.seed, kPretrainSalt));
    pretrained = &pretrained_entities;
    log << "pretrained entity embedding: " << cfg.pretrain_epochs << " epochs over "
        << data.prop.graph.triplets().size() << " triplets\n";
  }

  auto start = std::chrono::steady_clock::now();
  train::FitResult fit = train::fit(data.prop.graph, data.prop.ddi_base, data.splits[0],
                                    data.splits[1], mcfg, cfg.train, data.fingerprints,
                                    pretrained);
  log << "trained " << cfg.train.epochs << " epochs in " << seconds_since(start)
      << " s; best epoch " << fit.best_epoch << ", dev loss " << format_double(fit.best_val_loss)
      << "\n";

  ensure_dir(cfg.out_dir);
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"epoch", "train_loss", "val_loss"});
  for (const train::EpochRecord& r : fit.history)
    rows.push_back(
        {std::to_string(r.epoch), format_double(r.train_loss), format_double(r.val_loss)});
  const std::string history_path = cfg.out_dir + "/history.csv";
  write_csv(history_path, rows);
  write_names_tsv(cfg.out_dir + "/entity_ids.tsv", data.prop.graph.entity_names());
  write_names_tsv(cfg.out_dir + "/relation_ids.tsv", data.prop.graph.relation_names());

  Checkpoint ck;
  ck.task_mode = cfg.train.task_mode;
  ck.num_classes = data.full.num_classes;
  ck.ddi_base = data.prop.ddi_base;
  ck.best_epoch = fit.best_epoch;
  ck.best_val_loss = fit.best_val_loss;
  RunConfig snapshot = cfg;
  snapshot.model = mcfg;  // resolved fingerprint width and ablation flags
  // The output location is not an experiment parameter; normalizing it keeps
  // a sweep cell's checkpoint byte-identical to a direct run's.
  snapshot.out_dir = RunConfig{}.out_dir;
  ck.config_text = serialize_run_config(snapshot);
  ck.entity_names = data.prop.graph.entity_names();
  ck.relation_names = data.prop.graph.relation_names();
  for (auto& [name, t] : fit.params.named_tensors()) ck.tensors.emplace_back(name, *t);
  ck.has_optimizer = true;
  ck.adam_step = fit.adam_step;
  ck.adam_m = fit.adam_m;
  ck.adam_v = fit.adam_v;
  const std::string ck_path = cfg.out_dir + "/model.ckpt";
  save_checkpoint(ck, ck_path);
  log << "wrote " << history_path << ", " << ck_path << "\n";
  return {std::move(data), mcfg, std::move(fit), ck_path};
}

std::size_t split_index(const std::string& name) {
  if (name == "train") return 0;
  if (name == "dev") return 1;
  if (name == "test") return 2;
  fail("eval: unknown split '", name, "', expected train, dev, or test");
}

// The rebuilt graph must agree with the checkpoint's id maps; training on
// different files than the snapshot describes would silently misalign every
// embedding row.
void check_bundle_matches(const Checkpoint& ck, const DataBundle& data) {
  require(data.prop.graph.entity_names() == ck.entity_names,
          "checkpoint entity table does not match the graph rebuilt from its config");
  require(data.prop.graph.relation_names() == ck.relation_names,
          "checkpoint relation table does not match the graph rebuilt from its config");
  require(data.full.num_classes == ck.num_classes, "checkpoint expects ", ck.num_classes,
          " interaction classes, data has ", data.full.num_classes);
  require(data.prop.ddi_base == ck.ddi_base, "checkpoint interaction block starts at ",
          ck.ddi_base, ", rebuilt graph puts it at ", data.prop.ddi_base);
}

model::ModelParams restore_params(const Checkpoint& ck, const model::ModelConfig& mcfg,
                                  const DataBundle& data) {
  model::ModelParams params = model::init_params(mcfg, data.prop.graph.num_entities(),
                                                 data.prop.graph.num_relations(), 0);
  restore_model_params(ck, params);
  return params;
}

train::MetricsReport eval_checkpoint(const EvalOptions& opt, std::ostream& log) {
  const std::size_t idx = split_index(opt.split);
  Checkpoint ck = load_checkpoint(opt.checkpoint_path);
  if (!opt.task.empty()) {
    graph::TaskMode requested = parse_task_mode(opt.task, "eval");
    require(requested == ck.task_mode, "task mode mismatch: checkpoint is ",
            task_mode_name(ck.task_mode), ", data is ", opt.task);
  }
  RunConfig cfg = parse_run_config(ck.config_text, opt.checkpoint_path + " config");
  DataBundle data = load_bundle(cfg, log);
  check_bundle_matches(ck, data);
  model::ModelConfig mcfg = resolve_model(cfg, data, log);
  model::ModelParams params = restore_params(ck, mcfg, data);

  const graph::DDIDataset& split = data.splits[idx];
  require(!split.pairs.empty(), "eval: ", opt.split, " split has no pairs");

  std::vector<train::PairNegatives> negatives;
  const std::vector<train::PairNegatives>* negp = nullptr;
  if (ck.task_mode == graph::TaskMode::MultiLabel) {
    graph::TripletSet known;
    for (const graph::DDIDataset& ds : data.splits)
      for (const graph::DDIPair& pair : ds.pairs)
        for (std::uint32_t l : pair.labels) {
          known.insert(pair.u, l, pair.v);
          known.insert(pair.v, l, pair.u);
        }
    negatives = train::sample_eval_negatives(
        data.prop.graph, split, known,
        mix_seed(mix_seed(cfg.train.seed, kEvalNegSalt), idx));
    negp = &negatives;
  }

  std::vector<train::PredictionRecord> records =
      train::predict(data.prop.graph, data.prop.ddi_base, split, params, mcfg,
                     data.fingerprints, ck.task_mode, negp);
  train::MetricsReport report = train::evaluate(records, data.full.num_classes, ck.task_mode);

  std::string out_dir = opt.out_dir;
  if (out_dir.empty()) {
    out_dir = std::filesystem::path(opt.checkpoint_path).parent_path().string();
    if (out_dir.empty()) out_dir = ".";
  }
  ensure_dir(out_dir);

  std::vector<std::vector<std::string>> mrows;
  mrows.push_back({"metric", "value"});
  if (ck.task_mode == graph::TaskMode::MultiClass) {
    mrows.push_back({"macro_f1", format_double(report.macro_f1)});
    mrows.push_back({"accuracy", format_double(report.accuracy)});
    mrows.push_back({"kappa", format_double(report.kappa)});
    log << "eval " << opt.split << ": macro_f1 " << format_double(report.macro_f1)
        << ", accuracy " << format_double(report.accuracy) << ", kappa "
        << format_double(report.kappa) << "\n";
  } else {
    mrows.push_back({"roc_auc", format_double(report.roc_auc)});
    mrows.push_back({"pr_auc", format_double(report.pr_auc)});
    mrows.push_back({"ap_at_50", format_double(report.ap_at_50)});
    log << "eval " << opt.split << ": roc_auc " << format_double(report.roc_auc) << ", pr_auc "
        << format_double(report.pr_auc) << ", ap_at_50 " << format_double(report.ap_at_50)
        << "\n";
  }
  write_csv(out_dir + "/metrics.csv", mrows);

  std::vector<std::vector<std::string>> prows;
  prows.push_back({"relation", "name", "support", "value"});
  for (std::uint32_t r = 0; r < data.full.num_classes; ++r)
    prows.push_back({std::to_string(r),
                     ck.relation_names[static_cast<std::size_t>(ck.ddi_base) + r],
                     std::to_string(report.support[r]), format_double(report.per_relation[r])});
  write_csv(out_dir + "/per_relation.csv", prows);

  std::vector<std::size_t> train_counts(data.full.num_classes, 0);
  for (const graph::DDIPair& pair : data.splits[0].pairs)
    for (std::uint32_t l : pair.labels) ++train_counts[l];
  std::vector<train::SupportBin> bins =
      train::relation_bin_analysis(report.per_relation, train_counts);
  std::vector<std::vector<std::string>> brows;
  brows.push_back({"train_count_lo", "train_count_hi", "relation_count", "mean_value"});
  for (const train::SupportBin& b : bins)
    brows.push_back({std::to_string(b.lo), b.hi == SIZE_MAX ? "inf" : std::to_string(b.hi),
                     std::to_string(b.relation_count), format_double(b.mean_value)});
  write_csv(out_dir + "/relation_bins.csv", brows);

  log << "wrote " << out_dir << "/metrics.csv, per_relation.csv, relation_bins.csv\n";
  return report;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

graph::EntityId resolve_drug(const std::string& name, const graph::Vocab& entities) {
  if (auto id = entities.find(name)) return *id;
  std::vector<std::pair<std::size_t, std::string>> ranked;
  ranked.reserve(entities.size());
  for (const std::string& candidate : entities.names())
    ranked.emplace_back(edit_distance(name, candidate), candidate);
  std::sort(ranked.begin(), ranked.end());
  std::string tips;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
    if (i > 0) tips += ", ";
    tips += ranked[i].second;
  }
  fail("unknown drug '", name, "', nearest known names: ", tips);
}

std::string sanitize_name(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return out;
}

// The full-propagation baseline view of one pair: every entity as a node
// (centers first), every triplet as an edge except the pair's own interaction
// edges, distances BFS-clamped to k so position features stay well formed.
graph::EnclosingSubgraph full_graph_view(const graph::KnowledgeGraph& prop,
                                         const graph::DDIPair& pair, std::uint32_t k,
                                         graph::RelationId ddi_base) {
  graph::EnclosingSubgraph sg;
  sg.k = k;
  sg.center_u = pair.u;
  sg.center_v = pair.v;
  const std::size_t n = prop.num_entities();
  sg.global_nodes.reserve(n);
  sg.global_nodes.push_back(pair.u);
  sg.global_nodes.push_back(pair.v);
  for (graph::EntityId e = 0; e < n; ++e)
    if (e != pair.u && e != pair.v) sg.global_nodes.push_back(e);
  std::vector<std::uint32_t> pos(n, 0);
  for (std::size_t i = 0; i < sg.global_nodes.size(); ++i)
    pos[sg.global_nodes[i]] = static_cast<std::uint32_t>(i);
  const std::vector<std::uint32_t> du = graph::bfs_distances(prop, pair.u, k);
  const std::vector<std::uint32_t> dv = graph::bfs_distances(prop, pair.v, k);
  sg.dist_u.resize(n);
  sg.dist_v.resize(n);
  for (std::size_t i = 0; i < sg.global_nodes.size(); ++i) {
    const graph::EntityId e = sg.global_nodes[i];
    sg.dist_u[i] = std::min(du[e], k);
    sg.dist_v[i] = std::min(dv[e], k);
  }
  const std::vector<graph::Triplet> exclude =
      train::detail::own_interaction_edges(pair, ddi_base);
  for (const graph::Triplet& t : prop.triplets()) {
    bool skip = false;
    for (const graph::Triplet& x : exclude)
      if ((t.head == x.head && t.relation == x.relation && t.tail == x.tail) ||
          (t.head == x.tail && t.relation == x.relation && t.tail == x.head)) {
        skip = true;
        break;
      }
    if (skip) continue;
    sg.local_edges.push_back({pos[t.head], t.relation, pos[t.tail]});
  }
  return sg;
}

}  // namespace

void cmd_train(const RunConfig& cfg, std::ostream& log) { run_training(cfg, log); }

void cmd_eval(const EvalOptions& opt, std::ostream& log) { eval_checkpoint(opt, log); }

void cmd_explain(const ExplainOptions& opt, std::ostream& log) {
  Checkpoint ck = load_checkpoint(opt.checkpoint_path);
  RunConfig cfg = parse_run_config(ck.config_text, opt.checkpoint_path + " config");
  DataBundle data = load_bundle(cfg, log);
  check_bundle_matches(ck, data);
  model::ModelConfig mcfg = resolve_model(cfg, data, log);
  if (opt.gamma) {
    require(*opt.gamma >= -1.0 && *opt.gamma < 1.0, "explain: gamma ", *opt.gamma,
            " outside [-1, 1)");
    mcfg.gamma = *opt.gamma;
  }
  model::ModelParams params = restore_params(ck, mcfg, data);

  const graph::EntityId u = resolve_drug(opt.drug_u, data.entities);
  const graph::EntityId v = resolve_drug(opt.drug_v, data.entities);
  require(u != v, "explain: '", opt.drug_u, "' names both endpoints of the pair");

  // Exclude the pair's own interaction edges exactly as training would; a
  // pair absent from the dataset has nothing to hide.
  std::vector<graph::Triplet> exclude;
  for (const graph::DDIPair& pair : data.full.pairs)
    if ((pair.u == u && pair.v == v) || (pair.u == v && pair.v == u))
      for (std::uint32_t l : pair.labels)
        exclude.push_back({pair.u, data.prop.ddi_base + l, pair.v});
  const graph::EnclosingSubgraph sg =
      graph::extract_enclosing_subgraph(data.prop.graph, u, v, mcfg.k, exclude);

  tensor::Tape tape;
  std::mt19937_64 rng = make_rng(0);  // inference mode, dropout never fires
  model::ForwardResult fr =
      model::forward_on_tape(tape, sg, params, mcfg, data.fingerprints, false, rng);
  const tensor::Tensor& logits = tape.value(fr.logits);

  std::vector<double> probs(ck.num_classes, 0.0);
  if (ck.task_mode == graph::TaskMode::MultiClass) {
    double hi = logits.at(0, 0);
    for (std::size_t c = 1; c < probs.size(); ++c) hi = std::max(hi, logits.at(0, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < probs.size(); ++c) sum += probs[c] = std::exp(logits.at(0, c) - hi);
    for (double& p : probs) p /= sum;
  } else {
    for (std::size_t c = 0; c < probs.size(); ++c)
      probs[c] = 1.0 / (1.0 + std::exp(-logits.at(0, c)));
  }
  const std::size_t top = train::argmax_lowest(probs);
  log << "pair (" << opt.drug_u << ", " << opt.drug_v << "): predicted "
      << ck.relation_names[static_cast<std::size_t>(ck.ddi_base) + top] << " (label " << top
      << ") with probability " << format_double(probs[top]) << "\n";

  const explain::PathwayGraph pathway =
      explain::summarize_pathway(sg, fr.layer_masks.front(), data.prop.graph);

  std::string out_dir = opt.out_dir;
  if (out_dir.empty()) {
    out_dir = std::filesystem::path(opt.checkpoint_path).parent_path().string();
    if (out_dir.empty()) out_dir = ".";
  }
  ensure_dir(out_dir);
  explain::DotStyle style;
  style.gamma = mcfg.gamma;
  style.merge_antiparallel = opt.merge_antiparallel;
  const std::string stem =
      out_dir + "/pathway_" + sanitize_name(opt.drug_u) + "_" + sanitize_name(opt.drug_v);
  explain::export_dot(pathway, stem + ".dot", style);
  explain::export_json(pathway, stem + ".json");
  log << "pathway: " << pathway.nodes.size() << " nodes, " << pathway.edges.size()
      << " edges kept from a subgraph of " << sg.num_nodes() << " nodes, "
      << sg.local_edges.size() << " edges\n";
  log << "wrote " << stem << ".dot, " << stem << ".json\n";
}

void cmd_sweep(const RunConfig& cfg, const std::string& axis, const std::vector<double>& values,
               std::ostream& log) {
  require(axis == "k" || axis == "d" || axis == "gamma", "sweep: unknown axis '", axis,
          "', valid axes: k, d, gamma");
  require(!values.empty(), "sweep: no values given");
  ensure_dir(cfg.out_dir);

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"axis", "value", "macro_f1", "accuracy", "kappa", "roc_auc", "pr_auc",
                  "ap_at_50", "kept_edges"});
  for (double v : values) {
    RunConfig run = cfg;
    if (axis == "k") {
      require(v >= 0 && v == std::floor(v), "sweep: k value ", v, " is not a nonnegative integer");
      run.model.k = static_cast<std::uint32_t>(v);
    } else if (axis == "d") {
      require(v >= 1 && v == std::floor(v), "sweep: dim value ", v, " is not a positive integer");
      run.model.d = static_cast<std::size_t>(v);
    } else {
      run.model.gamma = v;
    }
    const std::string tag = axis + "_" + format_double(v);
    run.out_dir = cfg.out_dir + "/" + tag;
    log << "sweep " << tag << ":\n";
    TrainOutcome outcome = run_training(run, log);

    EvalOptions eopt;
    eopt.checkpoint_path = outcome.checkpoint_path;
    eopt.split = "test";
    eopt.out_dir = run.out_dir;
    const train::MetricsReport report = eval_checkpoint(eopt, log);

    // Edges surviving the attention threshold over the test subgraphs; the
    // count shrinks (or holds) as gamma rises.
    std::uint64_t kept = 0;
    for (const graph::DDIPair& pair : outcome.data.splits[2].pairs) {
      const graph::EnclosingSubgraph sg = train::detail::extract_pair(
          outcome.data.prop.graph, pair, outcome.mcfg.k, outcome.data.prop.ddi_base);
      const tensor::Tensor h0 =
          model::build_node_features(sg, outcome.fit.params.entity_embed);
      const model::AttentionMask mask =
          model::compute_attention(sg, h0, outcome.fit.params.attn_wi,
                                   outcome.fit.params.attn_wj,
                                   outcome.fit.params.rel_attn_embed, outcome.mcfg.gamma);
      kept += mask.kept();
    }
    log << "sweep " << tag << ": kept edges over test subgraphs " << kept << "\n";

    rows.push_back({axis, format_double(v), format_double(report.macro_f1),
                    format_double(report.accuracy), format_double(report.kappa),
                    format_double(report.roc_auc), format_double(report.pr_auc),
                    format_double(report.ap_at_50), std::to_string(kept)});
  }
  write_csv(cfg.out_dir + "/sweep.csv", rows);
  log << "wrote " << cfg.out_dir << "/sweep.csv\n";
}

void cmd_bench(const RunConfig& cfg, const BenchOptions& opt, std::ostream& log) {
  require(!opt.k_values.empty(), "bench: no k values given");
  DataBundle data = load_bundle(cfg, log);
  const model::ModelConfig base = resolve_model(cfg, data, log);
  const graph::DDIDataset& train_split = data.splits[0];
  require(!train_split.pairs.empty(), "bench: train split has no pairs");

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"k", "edges_touched_per_epoch", "wall_seconds", "pairs_timed"});
  std::vector<std::pair<std::uint32_t, std::uint64_t>> per_k;

  for (std::uint32_t k : opt.k_values) {
    model::ModelConfig mk = base;
    mk.k = k;
    model::ModelParams params = model::init_params(mk, data.prop.graph.num_entities(),
                                                   data.prop.graph.num_relations(),
                                                   cfg.train.seed);
    std::uint64_t edges = 0;
    auto start = std::chrono::steady_clock::now();
    for (const graph::DDIPair& pair : train_split.pairs) {
      const graph::EnclosingSubgraph sg =
          train::detail::extract_pair(data.prop.graph, pair, k, data.prop.ddi_base);
      edges += static_cast<std::uint64_t>(sg.local_edges.size()) * mk.L;
      model::forward_infer(sg, params, mk, data.fingerprints);
    }
    const double secs = seconds_since(start);
    per_k.emplace_back(k, edges);
    rows.push_back({std::to_string(k), std::to_string(edges), format_double(secs),
                    std::to_string(train_split.pairs.size())});
    log << "k=" << k << ": " << edges << " edges touched per epoch, " << secs << " s for "
        << train_split.pairs.size() << " forwards\n";
  }

  if (opt.include_full_graph) {
    const std::uint64_t full_edges = static_cast<std::uint64_t>(data.prop.graph.triplets().size()) *
                                     base.L * train_split.pairs.size();
    const std::size_t timed = std::min(opt.full_graph_pairs_timed, train_split.pairs.size());
    model::ModelParams params = model::init_params(base, data.prop.graph.num_entities(),
                                                   data.prop.graph.num_relations(),
                                                   cfg.train.seed);
    auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < timed; ++i) {
      const graph::EnclosingSubgraph sg =
          full_graph_view(data.prop.graph, train_split.pairs[i], base.k, data.prop.ddi_base);
      model::forward_infer(sg, params, base, data.fingerprints);
    }
    const double secs = seconds_since(start);
    rows.push_back({"full", std::to_string(full_edges), format_double(secs),
                    std::to_string(timed)});
    log << "full graph: " << full_edges << " edges per epoch, " << secs << " s for " << timed
        << " forwards\n";
    for (auto [k, edges] : per_k)
      log << "k=" << k << " touches " << format_double(100.0 * static_cast<double>(edges) /
                                                       static_cast<double>(full_edges))
          << "% of the full-graph count\n";
  }

  ensure_dir(cfg.out_dir);
  write_csv(cfg.out_dir + "/bench.csv", rows);
  log << "wrote " << cfg.out_dir << "/bench.csv\n";
}

void cmd_inspect(const std::string& checkpoint_path, std::ostream& log) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  log << checkpoint_path << ": format version " << ck.version << "\n";
  log << "  task " << task_mode_name(ck.task_mode) << ", " << ck.num_classes
      << " classes, interaction relations [" << ck.ddi_base << ", "
      << ck.ddi_base + ck.num_classes << ")\n";
  log << "  best epoch " << ck.best_epoch << ", dev loss " << format_double(ck.best_val_loss)
      << "\n";
  log << "  " << ck.entity_names.size() << " entities, " << ck.relation_names.size()
      << " relations\n";
  std::size_t total = 0;
  for (const auto& [name, t] : ck.tensors) {
    log << "  tensor " << name << ": " << t.rows() << " x " << t.cols() << "\n";
    total += t.rows() * t.cols();
  }
  log << "  " << ck.tensors.size() << " tensors, " << total << " parameters\n";
  if (ck.has_optimizer)
    log << "  optimizer: adam at step " << ck.adam_step << "\n";
  else
    log << "  optimizer: none\n";
  log << "  config snapshot:\n";
  std::istringstream in(ck.config_text);
  std::string line;
  while (std::getline(in, line)) log << "    " << line << "\n";
}

}  // namespace kgddi::io
