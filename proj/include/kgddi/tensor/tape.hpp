#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kgddi/tensor/tensor.hpp"

namespace kgddi::tensor {

class Tape;

// Handle to a tape node. Only valid for the tape that produced it.
struct Var {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

// Reverse-mode autodiff tape over Tensor values.
//
// Ops record enough to replay adjoints in exact reverse execution order;
// gradient accumulation is additive. A tape is single-owner: one forward and
// one backward per instance. Parameter leaves reference external tensors;
// backward() leaves their per-node adjoints on the tape and
// accumulate_param_grads() folds them into the bound tensors' grad buffers,
// so batch-parallel callers can run backward concurrently and fold serially
// in a fixed example order.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Leaves.
  Var leaf(Tensor value);                // constant, no gradient tracking
  Var param(Tensor& t);                  // bound leaf; repeated calls reuse the node
  Var param_rows(Tensor& table, std::vector<std::uint32_t> rows);  // gathered bound leaf

  // Primitives. Forward values are stored on the tape; any non-finite result
  // aborts with a diagnostic.
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);                   // elementwise
  Var mul_scalar(Var a, Var s);            // s is 1x1, broadcast multiply
  Var concat(const std::vector<Var>& parts, int axis);  // axis 0 (rows) or 1 (cols)
  Var tanh(Var a);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var softplus(Var a);                     // log(1 + e^x), stabilized
  Var softmax_rows(Var a);
  Var logsumexp_rows(Var a);               // n x c -> n x 1, stabilized
  Var mean_rows(Var a);                    // n x c -> 1 x c
  Var row_sum(Var a);                      // n x c -> n x 1
  Var scale(Var a, double c);
  Var scale_rows(Var a, Var s);            // s is n x 1, scales row i by s[i]
  Var dropout(Var a, double p, std::mt19937_64& rng, bool train);
  Var gather_rows(Var a, std::vector<std::uint32_t> indices);
  Var scatter_add_rows(Var base, std::vector<std::uint32_t> indices, Var values);
  Var basis_combine(Var coeffs, const std::vector<Var>& bases);  // sum_b coeffs[b] * V_b

  const Tensor& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Populates adjoints for every node reachable from loss (a 1x1 tensor).
  // Calling twice without a fresh forward is an error.
  void backward(Var loss);

  // Folds parameter-leaf adjoints into the bound tensors' grad buffers.
  void accumulate_param_grads();

  // Adjoint of a node after backward(); zero tensor if unreachable.
  Tensor grad_of(Var v) const;

 private:
  enum class Op : std::uint8_t {
    Leaf, Param, ParamRows, MatMul, Add, Mul, MulScalar, Concat, Tanh, Relu, Sigmoid,
    Softplus, SoftmaxRows, LogSumExpRows, MeanRows, RowSum, Scale, ScaleRows, Dropout,
    GatherRows, ScatterAddRows, BasisCombine,
  };

  struct Node {
    Op op;
    Tensor value;
    std::vector<std::uint32_t> inputs;
    std::vector<std::uint32_t> indices;  // gather/scatter rows
    std::vector<double> aux;             // dropout mask, cached softmax, ...
    double scalar = 0.0;
    int axis = 0;
    Tensor* bound = nullptr;
    Tensor grad;          // allocated during backward
    bool requires_grad = false;
  };

  Var push(Node node, const char* op_name);
  Node& node(Var v);
  const Node& node(Var v) const;
  void add_grad(std::uint32_t id, const Tensor& g);
  void backward_node(Node& n);

  std::vector<Node> nodes_;
  std::vector<std::pair<const Tensor*, std::uint32_t>> param_cache_;
  bool backward_done_ = false;
};

}  // namespace kgddi::tensor
