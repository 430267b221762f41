#include "kgddi/train/losses.hpp"

#include <algorithm>
#include <cmath>

#include "kgddi/error.hpp"

namespace kgddi::train {

using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

namespace {

double softplus(double x) {
  // log(1 + e^x) without overflow on either tail, same form the tape uses
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void check_logits(const Tensor& logits, std::size_t label, const char* what) {
  require(logits.rows() == 1, what, ": logits must be a single row, got ", logits.rows(), " rows");
  require(logits.cols() >= 1, what, ": logits are empty");
  require(label < logits.cols(), what, ": label ", label, " out of range for ", logits.cols(),
          " classes");
}

// 1 x R row with a single 1 at `label`, used to pick one logit on the tape.
Tensor onehot_row(std::size_t cols, std::size_t label) {
  Tensor t(1, cols);
  t.at(0, label) = 1.0;
  return t;
}

Var pick_logit(Tape& tape, Var logits, std::size_t label, const char* what) {
  check_logits(tape.value(logits), label, what);
  Var mask = tape.leaf(onehot_row(tape.value(logits).cols(), label));
  return tape.row_sum(tape.mul(logits, mask));
}

}  // namespace

double cross_entropy(const Tensor& logits, std::size_t label) {
  check_logits(logits, label, "cross_entropy");
  double mx = logits.at(0, 0);
  for (std::size_t j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits.at(0, j));
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.cols(); ++j) sum += std::exp(logits.at(0, j) - mx);
  return mx + std::log(sum) - logits.at(0, label);
}

double bce_with_negative(const Tensor& pos_logits, const Tensor& neg_logits, std::size_t label) {
  check_logits(pos_logits, label, "bce_with_negative");
  check_logits(neg_logits, label, "bce_with_negative");
  return softplus(-pos_logits.at(0, label)) + softplus(neg_logits.at(0, label));
}

Var cross_entropy_on_tape(Tape& tape, Var logits, std::size_t label) {
  Var picked = pick_logit(tape, logits, label, "cross_entropy");
  Var lse = tape.logsumexp_rows(logits);
  return tape.add(lse, tape.scale(picked, -1.0));
}

Var bce_on_tape(Tape& tape, Var pos_logits, Var neg_logits, std::size_t label) {
  Var pos = pick_logit(tape, pos_logits, label, "bce_with_negative");
  Var neg = pick_logit(tape, neg_logits, label, "bce_with_negative");
  return tape.add(tape.softplus(tape.scale(pos, -1.0)), tape.softplus(neg));
}

}  // namespace kgddi::train
