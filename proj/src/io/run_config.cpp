#include "kgddi/io/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kgddi/error.hpp"
#include "kgddi/io/csv.hpp"

namespace kgddi::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& context) {
  char* end = nullptr;
  double x = std::strtod(value.c_str(), &end);
  require(end == value.c_str() + value.size() && !value.empty(), context,
          ": expected a number, got '", value, "'");
  return x;
}

std::uint64_t parse_uint(const std::string& value, const std::string& context) {
  require(!value.empty() && value.find_first_not_of("0123456789") == std::string::npos, context,
          ": expected a nonnegative integer, got '", value, "'");
  return std::strtoull(value.c_str(), nullptr, 10);
}

bool parse_bool(const std::string& value, const std::string& context) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(context, ": expected true/false, got '", value, "'");
}

}  // namespace

graph::TaskMode parse_task_mode(const std::string& value, const std::string& context) {
  if (value == "multiclass") return graph::TaskMode::MultiClass;
  if (value == "multilabel") return graph::TaskMode::MultiLabel;
  fail(context, ": task_mode must be multiclass or multilabel, got '", value, "'");
}

const char* task_mode_name(graph::TaskMode mode) {
  return mode == graph::TaskMode::MultiClass ? "multiclass" : "multilabel";
}

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value,
                     const std::string& context) {
  if (key == "data.kg_file") {
    cfg.kg_file = value;
  } else if (key == "data.ddi_file") {
    cfg.ddi_file = value;
  } else if (key == "data.fingerprint_file") {
    cfg.fingerprint_file = value;
  } else if (key == "data.out_dir") {
    cfg.out_dir = value;
  } else if (key == "data.split_train") {
    cfg.split.train = parse_double(value, context);
  } else if (key == "data.split_dev") {
    cfg.split.dev = parse_double(value, context);
  } else if (key == "data.split_test") {
    cfg.split.test = parse_double(value, context);
  } else if (key == "data.split_seed") {
    cfg.split_seed = parse_uint(value, context);
  } else if (key == "data.stratified") {
    cfg.stratified = parse_bool(value, context);
  } else if (key == "data.task_mode") {
    cfg.train.task_mode = parse_task_mode(value, context);
  } else if (key == "model.k") {
    cfg.model.k = static_cast<std::uint32_t>(parse_uint(value, context));
  } else if (key == "model.dim") {
    cfg.model.d = parse_uint(value, context);
  } else if (key == "model.layers") {
    cfg.model.L = parse_uint(value, context);
  } else if (key == "model.bases") {
    cfg.model.B = parse_uint(value, context);
  } else if (key == "model.gamma") {
    cfg.model.gamma = parse_double(value, context);
  } else if (key == "model.dropout") {
    cfg.model.dropout_p = parse_double(value, context);
  } else if (key == "model.fingerprint_bits") {
    cfg.model.fingerprint_bits = parse_uint(value, context);
  } else if (key == "train.epochs") {
    cfg.train.epochs = parse_uint(value, context);
  } else if (key == "train.batch_size") {
    cfg.train.batch_size = parse_uint(value, context);
  } else if (key == "train.lr") {
    cfg.train.lr = parse_double(value, context);
  } else if (key == "train.weight_decay") {
    cfg.train.weight_decay = parse_double(value, context);
  } else if (key == "train.clip_norm") {
    cfg.train.clip_norm = parse_double(value, context);
  } else if (key == "train.seed") {
    cfg.train.seed = parse_uint(value, context);
  } else if (key == "train.threads") {
    cfg.train.threads = parse_uint(value, context);
  } else if (key == "train.pretrain_epochs") {
    cfg.pretrain_epochs = parse_uint(value, context);
  } else if (key == "train.pretrain_margin") {
    cfg.pretrain_margin = parse_double(value, context);
  } else if (key == "train.pretrain_lr") {
    cfg.pretrain_lr = parse_double(value, context);
  } else if (key == "ablation.no_kg") {
    cfg.model.use_kg = !parse_bool(value, context);
  } else if (key == "ablation.no_sum") {
    cfg.model.use_summarization = !parse_bool(value, context);
  } else if (key == "ablation.no_sf") {
    cfg.model.use_subgraph_feature = !parse_bool(value, context);
  } else if (key == "ablation.no_cf") {
    cfg.model.use_fingerprint = !parse_bool(value, context);
  } else if (key == "ablation.no_lia") {
    cfg.model.layer_independent_attention = !parse_bool(value, context);
  } else {
    fail(context, ": unknown config key '", key, "'");
  }
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    std::ostringstream ctx;
    ctx << origin << " line " << lineno;
    require(eq != std::string::npos, ctx.str(), ": expected key = value, got '", stripped, "'");
    apply_config_kv(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)), ctx.str());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& value) {
    out << key << " = " << value << "\n";
  };
  kv("data.kg_file", cfg.kg_file);
  kv("data.ddi_file", cfg.ddi_file);
  kv("data.fingerprint_file", cfg.fingerprint_file);
  kv("data.out_dir", cfg.out_dir);
  kv("data.split_train", format_double(cfg.split.train));
  kv("data.split_dev", format_double(cfg.split.dev));
  kv("data.split_test", format_double(cfg.split.test));
  kv("data.split_seed", std::to_string(cfg.split_seed));
  kv("data.stratified", cfg.stratified ? "true" : "false");
  kv("data.task_mode", task_mode_name(cfg.train.task_mode));
  kv("model.k", std::to_string(cfg.model.k));
  kv("model.dim", std::to_string(cfg.model.d));
  kv("model.layers", std::to_string(cfg.model.L));
  kv("model.bases", std::to_string(cfg.model.B));
  kv("model.gamma", format_double(cfg.model.gamma));
  kv("model.dropout", format_double(cfg.model.dropout_p));
  kv("model.fingerprint_bits", std::to_string(cfg.model.fingerprint_bits));
  kv("train.epochs", std::to_string(cfg.train.epochs));
  kv("train.batch_size", std::to_string(cfg.train.batch_size));
  kv("train.lr", format_double(cfg.train.lr));
  kv("train.weight_decay", format_double(cfg.train.weight_decay));
  kv("train.clip_norm", format_double(cfg.train.clip_norm));
  kv("train.seed", std::to_string(cfg.train.seed));
  kv("train.threads", std::to_string(cfg.train.threads));
  kv("train.pretrain_epochs", std::to_string(cfg.pretrain_epochs));
  kv("train.pretrain_margin", format_double(cfg.pretrain_margin));
  kv("train.pretrain_lr", format_double(cfg.pretrain_lr));
  kv("ablation.no_kg", cfg.model.use_kg ? "false" : "true");
  kv("ablation.no_sum", cfg.model.use_summarization ? "false" : "true");
  kv("ablation.no_sf", cfg.model.use_subgraph_feature ? "false" : "true");
  kv("ablation.no_cf", cfg.model.use_fingerprint ? "false" : "true");
  kv("ablation.no_lia", cfg.model.layer_independent_attention ? "false" : "true");
  return out.str();
}

}  // namespace kgddi::io
