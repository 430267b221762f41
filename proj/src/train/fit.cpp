#include "kgddi/train/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>
#include <utility>

#include "detail.hpp"
#include "kgddi/error.hpp"
#include "kgddi/graph/subgraph.hpp"
#include "kgddi/model/model.hpp"
#include "kgddi/rng.hpp"
#include "kgddi/tensor/optim.hpp"
#include "kgddi/tensor/tape.hpp"
#include "kgddi/train/losses.hpp"

namespace kgddi::train {

namespace {

using detail::check_dataset;
using detail::edge_count;
using detail::extract_pair;

// Salts separating the independent randomness streams of one run.
constexpr std::uint64_t kShuffleSalt = 0x6f726465u;  // per-epoch example order
constexpr std::uint64_t kExampleSalt = 0x64726f70u;  // dropout draws and corrupted tails
constexpr std::uint64_t kDevNegSalt = 0x6e656773u;   // fixed dev-split negatives

// One training edge: a pair index and one of its labels.
struct EdgeRef {
  std::uint32_t pair;
  std::uint32_t label;
};

}  // namespace

void TrainConfig::validate() const {
  require(epochs >= 1, "epochs must be positive");
  require(batch_size >= 1, "batch_size must be positive");
  require(lr > 0.0, "lr must be positive, got ", lr);
  require(weight_decay >= 0.0, "weight_decay must be nonnegative, got ", weight_decay);
  require(clip_norm > 0.0, "clip_norm must be positive, got ", clip_norm);
  require(threads >= 1, "threads must be positive");
}

std::vector<PairNegatives> sample_eval_negatives(const graph::KnowledgeGraph& prop,
                                                 const graph::DDIDataset& ds,
                                                 const graph::TripletSet& known_positives,
                                                 std::uint64_t seed) {
  graph::DegreeTable degrees(prop);
  std::mt19937_64 rng = make_rng(seed);
  std::vector<PairNegatives> out;
  out.reserve(ds.pairs.size());
  for (const graph::DDIPair& pair : ds.pairs) {
    PairNegatives pn;
    pn.tails.reserve(pair.labels.size());
    for (std::uint32_t l : pair.labels)
      pn.tails.push_back(
          graph::sample_negative_tail(degrees, {pair.u, l, pair.v}, known_positives, rng));
    out.push_back(std::move(pn));
  }
  return out;
}

double total_loss(const graph::KnowledgeGraph& prop, graph::RelationId ddi_base,
                  const graph::DDIDataset& ds, model::ModelParams& params,
                  const model::ModelConfig& cfg, const graph::FingerprintTable& fingerprints,
                  graph::TaskMode mode, const std::vector<PairNegatives>* negatives) {
  require(!ds.pairs.empty(), "total_loss: empty batch");
  check_dataset(ds, cfg.num_ddi_relations, mode, "loss");
  if (mode == graph::TaskMode::MultiLabel) {
    require(negatives != nullptr && negatives->size() == ds.pairs.size(),
            "multi-label loss needs one fixed negative per positive edge");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    const graph::DDIPair& pair = ds.pairs[i];
    graph::EnclosingSubgraph sg = extract_pair(prop, pair, cfg.k, ddi_base);
    tensor::Tensor logits = model::forward_infer(sg, params, cfg, fingerprints);
    if (mode == graph::TaskMode::MultiClass) {
      sum += cross_entropy(logits, pair.labels[0]);
    } else {
      const PairNegatives& pn = (*negatives)[i];
      require(pn.tails.size() == pair.labels.size(), "pair (", pair.u, ", ", pair.v, "): ",
              pn.tails.size(), " negatives for ", pair.labels.size(), " labels");
      for (std::size_t j = 0; j < pair.labels.size(); ++j) {
        // the corrupted edge itself is absent from the graph, nothing to exclude
        graph::EnclosingSubgraph neg_sg =
            graph::extract_enclosing_subgraph(prop, pair.u, pn.tails[j], cfg.k);
        tensor::Tensor neg_logits = model::forward_infer(neg_sg, params, cfg, fingerprints);
        sum += bce_with_negative(logits, neg_logits, pair.labels[j]);
      }
    }
  }
  return sum;
}

FitResult fit(const graph::KnowledgeGraph& prop, graph::RelationId ddi_base,
              const graph::DDIDataset& train_split, const graph::DDIDataset& dev_split,
              const model::ModelConfig& mcfg, const TrainConfig& tcfg,
              const graph::FingerprintTable& fingerprints,
              const tensor::Tensor* pretrained_entities) {
  tcfg.validate();
  mcfg.validate(prop.num_relations());
  check_dataset(train_split, mcfg.num_ddi_relations, tcfg.task_mode, "train");
  check_dataset(dev_split, mcfg.num_ddi_relations, tcfg.task_mode, "dev");
  require(static_cast<std::size_t>(ddi_base) + mcfg.num_ddi_relations <= prop.num_relations(),
          "interaction block [", ddi_base, ", ", ddi_base + mcfg.num_ddi_relations,
          ") exceeds the graph's ", prop.num_relations(), " relations");

  const bool multilabel = tcfg.task_mode == graph::TaskMode::MultiLabel;

  model::ModelParams params =
      model::init_params(mcfg, prop.num_entities(), prop.num_relations(), tcfg.seed);
  if (pretrained_entities != nullptr) {
    require(pretrained_entities->rows() == params.entity_embed.rows() &&
                pretrained_entities->cols() == params.entity_embed.cols(),
            "pretrained entity table is ", pretrained_entities->rows(), "x",
            pretrained_entities->cols(), ", expected ", params.entity_embed.rows(), "x",
            params.entity_embed.cols());
    params.entity_embed.values() = pretrained_entities->values();
  }

  // Positive subgraphs are fixed for the whole run; extract them once.
  std::vector<graph::EnclosingSubgraph> pos_sg;
  pos_sg.reserve(train_split.pairs.size());
  for (const graph::DDIPair& pair : train_split.pairs)
    pos_sg.push_back(extract_pair(prop, pair, mcfg.k, ddi_base));

  std::vector<EdgeRef> edges;
  for (std::uint32_t i = 0; i < train_split.pairs.size(); ++i)
    for (std::uint32_t l : train_split.pairs[i].labels) edges.push_back({i, l});

  graph::TripletSet known;
  std::unique_ptr<graph::DegreeTable> degrees;
  std::vector<PairNegatives> dev_negatives;
  if (multilabel) {
    for (const graph::DDIDataset* ds : {&train_split, &dev_split}) {
      for (const graph::DDIPair& pair : ds->pairs) {
        for (std::uint32_t l : pair.labels) {
          known.insert(pair.u, l, pair.v);
          known.insert(pair.v, l, pair.u);
        }
      }
    }
    degrees = std::make_unique<graph::DegreeTable>(prop);
    dev_negatives =
        sample_eval_negatives(prop, dev_split, known, mix_seed(tcfg.seed, kDevNegSalt));
  }

  std::vector<tensor::Tensor*> tensors = params.tensors();
  tensor::Adam adam({tcfg.lr, 0.9, 0.999, 1e-8, tcfg.weight_decay}, tensors);

  FitResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  const double train_edges = static_cast<double>(edges.size());
  const double dev_edges = static_cast<double>(edge_count(dev_split, tcfg.task_mode));

  std::vector<std::uint32_t> order(edges.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng = make_rng(mix_seed(mix_seed(tcfg.seed, kShuffleSalt), epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);

    double epoch_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += tcfg.batch_size, ++batch_index) {
      const std::size_t batch_n = std::min(tcfg.batch_size, order.size() - start);
      adam.zero_grads();

      std::vector<double> losses(batch_n, 0.0);
      std::vector<std::unique_ptr<tensor::Tape>> tapes(batch_n);

      // Forward, loss, and backward are tape-local, so examples may run in
      // parallel; every shared write happens in the serial fold below.
      auto run_example = [&](std::size_t bi) {
        const std::uint32_t edge_id = order[start + bi];
        const EdgeRef e = edges[edge_id];
        const graph::DDIPair& pair = train_split.pairs[e.pair];
        std::mt19937_64 ex_rng =
            make_rng(mix_seed(mix_seed(mix_seed(tcfg.seed, kExampleSalt), epoch), edge_id));
        auto tape = std::make_unique<tensor::Tape>();
        model::ForwardResult pos =
            model::forward_on_tape(*tape, pos_sg[e.pair], params, mcfg, fingerprints,
                                   /*train=*/true, ex_rng);
        tensor::Var loss;
        if (!multilabel) {
          loss = cross_entropy_on_tape(*tape, pos.logits, e.label);
        } else {
          graph::EntityId w =
              graph::sample_negative_tail(*degrees, {pair.u, e.label, pair.v}, known, ex_rng);
          graph::EnclosingSubgraph neg_sg =
              graph::extract_enclosing_subgraph(prop, pair.u, w, mcfg.k);
          model::ForwardResult neg = model::forward_on_tape(*tape, neg_sg, params, mcfg,
                                                            fingerprints, /*train=*/true, ex_rng);
          loss = bce_on_tape(*tape, pos.logits, neg.logits, e.label);
        }
        tape->backward(loss);
        losses[bi] = tape->value(loss).at(0, 0);
        tapes[bi] = std::move(tape);
      };

      const std::size_t workers = std::min(tcfg.threads, batch_n);
      try {
        if (workers <= 1) {
          for (std::size_t bi = 0; bi < batch_n; ++bi) run_example(bi);
        } else {
          std::vector<std::thread> pool;
          std::vector<std::exception_ptr> errors(workers);
          const std::size_t chunk = (batch_n + workers - 1) / workers;
          for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
              try {
                const std::size_t lo = t * chunk;
                const std::size_t hi = std::min(lo + chunk, batch_n);
                for (std::size_t bi = lo; bi < hi; ++bi) run_example(bi);
              } catch (...) {
                errors[t] = std::current_exception();
              }
            });
          }
          for (std::thread& th : pool) th.join();
          for (std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
        }
      } catch (const std::exception& e) {
        fail("epoch ", epoch, " batch ", batch_index, ": ", e.what());
      }

      // Fixed fold order keeps the gradient sums bitwise stable.
      for (std::size_t bi = 0; bi < batch_n; ++bi) {
        epoch_sum += losses[bi];
        tapes[bi]->accumulate_param_grads();
      }
      tensor::clip_global_norm(tensors, tcfg.clip_norm);
      adam.step();
    }

    const double train_loss = epoch_sum / train_edges;
    const double val_loss =
        total_loss(prop, ddi_base, dev_split, params, mcfg, fingerprints, tcfg.task_mode,
                   multilabel ? &dev_negatives : nullptr) /
        dev_edges;
    result.history.push_back({epoch, train_loss, val_loss});
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.params = params;
      result.adam_step = adam.step_count();
      result.adam_m.assign(adam.param_count(), {});
      result.adam_v.assign(adam.param_count(), {});
      for (std::size_t i = 0; i < adam.param_count(); ++i) {
        result.adam_m[i] = adam.first_moment(i);
        result.adam_v[i] = adam.second_moment(i);
      }
    }
  }
  return result;
}

}  // namespace kgddi::train
