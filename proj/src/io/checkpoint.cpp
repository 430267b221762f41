#include "kgddi/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "kgddi/error.hpp"

namespace kgddi::io {

namespace {

constexpr char kHeadMagic[8] = {'K', 'G', 'D', 'D', 'I', 'C', 'K', 'P'};
constexpr char kTailMagic[8] = {'K', 'G', 'D', 'D', 'I', 'E', 'N', 'D'};

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

// Bounds-checked forward reader over the verified payload.
class Cursor {
 public:
  Cursor(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  std::uint8_t u8() {
    need(1);
    return byte(at_++);
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte(at_ + i)) << (8 * i);
    at_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte(at_ + i)) << (8 * i);
    at_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = bytes_.substr(at_, n);
    at_ += n;
    return s;
  }

  std::vector<double> f64_block(std::uint64_t count) {
    need(count * 8);
    std::vector<double> v(count);
    std::memcpy(v.data(), bytes_.data() + at_, count * 8);
    at_ += count * 8;
    if constexpr (std::endian::native != std::endian::little)
      for (double& x : v) x = std::bit_cast<double>(byteswap64(std::bit_cast<std::uint64_t>(x)));
    return v;
  }

  void expect_magic(const char (&magic)[8]) {
    need(8);
    require(std::memcmp(bytes_.data() + at_, magic, 8) == 0, path_,
            ": not a checkpoint file (bad magic)");
    at_ += 8;
  }

  bool done() const { return at_ == bytes_.size(); }

 private:
  static std::uint64_t byteswap64(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return r;
  }

  unsigned char byte(std::size_t i) const { return static_cast<unsigned char>(bytes_[i]); }

  void need(std::uint64_t n) {
    require(at_ + n <= bytes_.size() && at_ + n >= at_, path_,
            ": checkpoint truncated (integrity check failed)");
  }

  const std::string& bytes_;
  std::string path_;
  std::size_t at_ = 0;
};

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  require(!ck.has_optimizer || (ck.adam_m.size() == ck.tensors.size() &&
                                ck.adam_v.size() == ck.tensors.size()),
          "checkpoint: optimizer buffers must align with the tensor list");
  std::string out;
  out.append(kHeadMagic, 8);
  put_u32(out, ck.version);
  out.push_back(ck.task_mode == graph::TaskMode::MultiClass ? 0 : 1);
  put_u64(out, ck.num_classes);
  put_u64(out, ck.ddi_base);
  put_u64(out, ck.best_epoch);
  put_f64(out, ck.best_val_loss);
  put_str(out, ck.config_text);

  put_u64(out, ck.entity_names.size());
  for (const std::string& s : ck.entity_names) put_str(out, s);
  put_u64(out, ck.relation_names.size());
  for (const std::string& s : ck.relation_names) put_str(out, s);

  put_u64(out, ck.tensors.size());
  for (const auto& [name, t] : ck.tensors) {
    put_str(out, name);
    put_u64(out, t.rows());
    put_u64(out, t.cols());
    for (double v : t.values()) put_f64(out, v);
  }

  out.push_back(ck.has_optimizer ? 1 : 0);
  if (ck.has_optimizer) {
    put_u64(out, ck.adam_step);
    put_u64(out, ck.adam_m.size());
    for (std::size_t i = 0; i < ck.adam_m.size(); ++i) {
      require(ck.adam_m[i].size() == ck.adam_v[i].size(),
              "checkpoint: moment buffers differ in length at index ", i);
      put_u64(out, ck.adam_m[i].size());
      for (double v : ck.adam_m[i]) put_f64(out, v);
      for (double v : ck.adam_v[i]) put_f64(out, v);
    }
  }

  put_u64(out, fnv1a64(out));
  out.append(kTailMagic, 8);

  std::ofstream f(path, std::ios::binary);
  require(f.good(), "cannot write ", path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  require(f.good(), "write failed for ", path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open ", path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  // trailer first: a file missing its checksum or end marker never parses
  require(bytes.size() >= 32, path, ": checkpoint truncated (integrity check failed)");
  require(std::memcmp(bytes.data() + bytes.size() - 8, kTailMagic, 8) == 0, path,
          ": checkpoint truncated (integrity check failed)");
  const std::string payload = bytes.substr(0, bytes.size() - 16);
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i)
    stored |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(bytes[bytes.size() - 16 + i]))
              << (8 * i);
  require(fnv1a64(payload) == stored, path, ": checkpoint corrupted (checksum mismatch)");

  Cursor in(payload, path);
  in.expect_magic(kHeadMagic);
  Checkpoint ck;
  ck.version = in.u32();
  require(ck.version == kCheckpointVersion, path, ": checkpoint version ", ck.version,
          " not supported, this build reads version ", kCheckpointVersion);
  ck.task_mode = in.u8() == 0 ? graph::TaskMode::MultiClass : graph::TaskMode::MultiLabel;
  ck.num_classes = in.u64();
  ck.ddi_base = in.u64();
  ck.best_epoch = in.u64();
  ck.best_val_loss = in.f64();
  ck.config_text = in.str();

  const std::uint64_t num_entities = in.u64();
  ck.entity_names.reserve(num_entities);
  for (std::uint64_t i = 0; i < num_entities; ++i) ck.entity_names.push_back(in.str());
  const std::uint64_t num_relations = in.u64();
  ck.relation_names.reserve(num_relations);
  for (std::uint64_t i = 0; i < num_relations; ++i) ck.relation_names.push_back(in.str());

  const std::uint64_t num_tensors = in.u64();
  ck.tensors.reserve(num_tensors);
  for (std::uint64_t i = 0; i < num_tensors; ++i) {
    std::string name = in.str();
    const std::uint64_t rows = in.u64();
    const std::uint64_t cols = in.u64();
    ck.tensors.emplace_back(std::move(name), tensor::Tensor(rows, cols, in.f64_block(rows * cols)));
  }

  ck.has_optimizer = in.u8() != 0;
  if (ck.has_optimizer) {
    ck.adam_step = in.u64();
    const std::uint64_t buffers = in.u64();
    ck.adam_m.reserve(buffers);
    ck.adam_v.reserve(buffers);
    for (std::uint64_t i = 0; i < buffers; ++i) {
      const std::uint64_t len = in.u64();
      ck.adam_m.push_back(in.f64_block(len));
      ck.adam_v.push_back(in.f64_block(len));
    }
  }
  require(in.done(), path, ": trailing bytes after the checkpoint payload");
  return ck;
}

void restore_model_params(const Checkpoint& ck, model::ModelParams& params) {
  auto named = params.named_tensors();
  require(named.size() == ck.tensors.size(), "checkpoint holds ", ck.tensors.size(),
          " tensors, the model expects ", named.size());
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& [name, stored] = ck.tensors[i];
    require(name == named[i].first, "checkpoint tensor ", i, " is '", name, "', the model expects '",
            named[i].first, "'");
    require(stored.same_shape(*named[i].second), "checkpoint tensor '", name, "' is ",
            stored.shape_str(), ", the model expects ", named[i].second->shape_str());
    named[i].second->values() = stored.values();
  }
}

}  // namespace kgddi::io
