#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgddi/io/commands.hpp"
#include "kgddi/io/run_config.hpp"
#include "kgddi/io/synth.hpp"

namespace {

// Flags shared by the commands that run the training pipeline. A config file
// is applied first, then every explicitly given flag overrides its key.
class CommonFlags {
 public:
  void attach(CLI::App* cmd) {
    config_opt_ = cmd->add_option("--config", config_, "config file (key = value lines)");
    kg_opt_ = cmd->add_option("--kg", kg_, "knowledge-graph triplet file");
    ddi_opt_ = cmd->add_option("--ddi", ddi_, "interaction pair file");
    fp_opt_ = cmd->add_option("--fingerprints", fp_, "drug fingerprint file");
    task_opt_ = cmd->add_option("--task", task_, "task mode: multiclass or multilabel");
    seed_opt_ = cmd->add_option("--seed", seed_, "training and split seed");
    threads_opt_ =
        cmd->add_option("--threads", threads_, "worker threads (1 is bitwise reproducible)");
    k_opt_ = cmd->add_option("--k", k_, "subgraph hop budget");
    dim_opt_ = cmd->add_option("--dim", dim_, "hidden width per layer");
    gamma_opt_ = cmd->add_option("--gamma", gamma_, "attention pruning threshold");
    epochs_opt_ = cmd->add_option("--epochs", epochs_, "training epochs");
    cmd->add_option("--ablation", ablations_, "disable a model component (repeatable)")
        ->check(CLI::IsMember({"no-kg", "no-sum", "no-sf", "no-cf", "no-lia"}));
    out_opt_ = cmd->add_option("--out", out_, "output directory");
  }

  kgddi::io::RunConfig build() const {
    kgddi::io::RunConfig cfg;
    if (config_opt_->count() > 0) cfg = kgddi::io::load_run_config(config_);
    if (kg_opt_->count() > 0) cfg.kg_file = kg_;
    if (ddi_opt_->count() > 0) cfg.ddi_file = ddi_;
    if (fp_opt_->count() > 0) cfg.fingerprint_file = fp_;
    if (task_opt_->count() > 0)
      cfg.train.task_mode = kgddi::io::parse_task_mode(task_, "--task");
    if (seed_opt_->count() > 0) {
      cfg.train.seed = seed_;
      cfg.split_seed = seed_;
    }
    if (threads_opt_->count() > 0) cfg.train.threads = threads_;
    if (k_opt_->count() > 0) cfg.model.k = k_;
    if (dim_opt_->count() > 0) cfg.model.d = dim_;
    if (gamma_opt_->count() > 0) cfg.model.gamma = gamma_;
    if (epochs_opt_->count() > 0) cfg.train.epochs = epochs_;
    if (out_opt_->count() > 0) cfg.out_dir = out_;
    for (const std::string& a : ablations_) {
      if (a == "no-kg")
        cfg.model.use_kg = false;
      else if (a == "no-sum")
        cfg.model.use_summarization = false;
      else if (a == "no-sf")
        cfg.model.use_subgraph_feature = false;
      else if (a == "no-cf")
        cfg.model.use_fingerprint = false;
      else
        cfg.model.layer_independent_attention = false;
    }
    return cfg;
  }

 private:
  std::string config_, kg_, ddi_, fp_, task_, out_;
  std::uint64_t seed_ = 1;
  std::size_t threads_ = 1, dim_ = 32, epochs_ = 50;
  std::uint32_t k_ = 2;
  double gamma_ = 0.0;
  std::vector<std::string> ablations_;
  CLI::Option *config_opt_ = nullptr, *kg_opt_ = nullptr, *ddi_opt_ = nullptr,
              *fp_opt_ = nullptr, *task_opt_ = nullptr, *seed_opt_ = nullptr,
              *threads_opt_ = nullptr, *k_opt_ = nullptr, *dim_opt_ = nullptr,
              *gamma_opt_ = nullptr, *epochs_opt_ = nullptr, *out_opt_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph link prediction toolkit for typed drug interactions"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  train_flags.attach(train_cmd);
  train_cmd->callback([&] { kgddi::io::cmd_train(train_flags.build(), std::cout); });

  kgddi::io::EvalOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a split with a trained checkpoint");
  eval_cmd->add_option("checkpoint", eval_opt.checkpoint_path, "checkpoint file")->required();
  eval_cmd->add_option("--split", eval_opt.split, "train, dev, or test (default test)");
  eval_cmd->add_option("--task", eval_opt.task, "assert the checkpoint's task mode");
  eval_cmd->add_option("--out", eval_opt.out_dir,
                       "output directory (default: the checkpoint's directory)");
  eval_cmd->callback([&] { kgddi::io::cmd_eval(eval_opt, std::cout); });

  kgddi::io::ExplainOptions explain_opt;
  double explain_gamma = 0.0;
  CLI::App* explain_cmd =
      app.add_subcommand("explain", "export the reasoning pathway for one drug pair");
  explain_cmd->add_option("checkpoint", explain_opt.checkpoint_path, "checkpoint file")
      ->required();
  explain_cmd->add_option("drug_u", explain_opt.drug_u, "first drug name")->required();
  explain_cmd->add_option("drug_v", explain_opt.drug_v, "second drug name")->required();
  CLI::Option* explain_gamma_opt = explain_cmd->add_option(
      "--gamma", explain_gamma, "override the trained pruning threshold");
  explain_cmd->add_flag("--merge-antiparallel", explain_opt.merge_antiparallel,
                        "draw antiparallel edge pairs as one undirected edge of max weight");
  explain_cmd->add_option("--out", explain_opt.out_dir,
                          "output directory (default: the checkpoint's directory)");
  explain_cmd->callback([&] {
    if (explain_gamma_opt->count() > 0) explain_opt.gamma = explain_gamma;
    kgddi::io::cmd_explain(explain_opt, std::cout);
  });

  CommonFlags sweep_flags;
  std::string sweep_axis;
  std::vector<double> sweep_values;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "train and evaluate once per value of one hyperparameter");
  sweep_flags.attach(sweep_cmd);
  sweep_cmd->add_option("--axis", sweep_axis, "hyperparameter to vary: k, d, or gamma")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "axis values")->required();
  sweep_cmd->callback(
      [&] { kgddi::io::cmd_sweep(sweep_flags.build(), sweep_axis, sweep_values, std::cout); });

  CommonFlags bench_flags;
  kgddi::io::BenchOptions bench_opt;
  std::vector<std::uint32_t> bench_k;
  bool bench_no_full = false;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "count propagation edges touched per epoch at each k");
  bench_flags.attach(bench_cmd);
  bench_cmd->add_option("--k-values", bench_k, "hop budgets to measure (default 1 2)");
  bench_cmd->add_flag("--no-full-graph", bench_no_full,
                      "skip the full-propagation baseline row");
  bench_cmd->add_option("--full-pairs", bench_opt.full_graph_pairs_timed,
                        "pairs timed in full-graph mode");
  bench_cmd->callback([&] {
    if (!bench_k.empty()) bench_opt.k_values = bench_k;
    bench_opt.include_full_graph = !bench_no_full;
    kgddi::io::cmd_bench(bench_flags.build(), bench_opt, std::cout);
  });

  kgddi::io::SynthSpec synth_spec;
  std::string synth_out = "synth";
  CLI::App* synth_cmd =
      app.add_subcommand("gen-synth", "generate a planted-motif dataset with a truth manifest");
  synth_cmd->add_option("--drugs", synth_spec.num_drugs, "drug entity count");
  synth_cmd->add_option("--genes", synth_spec.num_genes, "gene entity count");
  synth_cmd->add_option("--classes", synth_spec.num_classes,
                        "interaction class count (perfect square)");
  synth_cmd->add_option("--edges-per-drug", synth_spec.edges_per_drug,
                        "background triplets per drug");
  synth_cmd->add_option("--pairs", synth_spec.num_pairs,
                        "interaction pair count (0 picks 2x drugs)");
  synth_cmd->add_option("--noise", synth_spec.noise_edges, "random gene-gene triplets");
  synth_cmd->add_option("--bits", synth_spec.fingerprint_bits, "fingerprint width");
  synth_cmd->add_option("--seed", synth_spec.seed, "generator seed");
  synth_cmd->add_option("--out", synth_out, "output directory");
  synth_cmd->callback([&] {
    kgddi::io::SynthPaths paths = kgddi::io::gen_synth(synth_spec, synth_out);
    std::cout << "wrote " << paths.kg_file << ", " << paths.ddi_file << ", "
              << paths.fingerprint_file << ", " << paths.truth_file << "\n";
  });

  std::string inspect_path;
  CLI::App* inspect_cmd =
      app.add_subcommand("inspect-checkpoint", "print checkpoint metadata and tensors");
  inspect_cmd->add_option("checkpoint", inspect_path, "checkpoint file")->required();
  inspect_cmd->callback([&] { kgddi::io::cmd_inspect(inspect_path, std::cout); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
