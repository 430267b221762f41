#include "kgddi/tensor/tape.hpp"

#include <algorithm>
#include <cmath>

#include "kgddi/rng.hpp"
#include "kgddi/tensor/kernels.hpp"

namespace kgddi::tensor {

namespace {
const kernels::Backend& kern() { return kernels::active(); }

double stable_softplus(double x) {
  // log(1 + e^x) without overflow on either tail
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
}  // namespace

Var Tape::push(Node n, const char* op_name) {
  check_finite(n.value, op_name);
  nodes_.push_back(std::move(n));
  require(nodes_.size() < UINT32_MAX, "tape overflow");
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tape::Node& Tape::node(Var v) {
  require(v.valid() && v.id < nodes_.size(), "invalid tape handle");
  return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
  require(v.valid() && v.id < nodes_.size(), "invalid tape handle");
  return nodes_[v.id];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  return push(std::move(n), "leaf");
}

Var Tape::param(Tensor& t) {
  require(t.requires_grad, "param leaf requires requires_grad");
  for (const auto& [ptr, id] : param_cache_)
    if (ptr == &t) return Var{id};
  Node n;
  n.op = Op::Param;
  n.value = t;  // copy; params are read-only during the pass
  n.bound = &t;
  n.requires_grad = true;
  Var v = push(std::move(n), "param");
  param_cache_.emplace_back(&t, v.id);
  return v;
}

Var Tape::param_rows(Tensor& table, std::vector<std::uint32_t> rows) {
  require(table.requires_grad, "param_rows requires requires_grad");
  Tensor gathered(rows.size(), table.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < table.rows(), "param_rows: row ", rows[i], " out of range ", table.rows());
    for (std::size_t j = 0; j < table.cols(); ++j) gathered.at(i, j) = table.at(rows[i], j);
  }
  Node n;
  n.op = Op::ParamRows;
  n.value = std::move(gathered);
  n.bound = &table;
  n.indices = std::move(rows);
  n.requires_grad = true;
  return push(std::move(n), "param_rows");
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.cols() == B.rows(), "matmul: shape mismatch ", A.shape_str(), " x ", B.shape_str());
  Node n;
  n.op = Op::MatMul;
  n.value = Tensor(A.rows(), B.cols());
  kern().matmul(A.data(), B.data(), n.value.data(), A.rows(), A.cols(), B.cols());
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n), "matmul");
}

Var Tape::add(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.same_shape(B), "add: shape mismatch ", A.shape_str(), " vs ", B.shape_str());
  Node n;
  n.op = Op::Add;
  n.value = Tensor(A.rows(), A.cols());
  kern().add(A.data(), B.data(), n.value.data(), A.numel());
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n), "add");
}

Var Tape::mul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.same_shape(B), "mul: shape mismatch ", A.shape_str(), " vs ", B.shape_str());
  Node n;
  n.op = Op::Mul;
  n.value = Tensor(A.rows(), A.cols());
  kern().hadamard(A.data(), B.data(), n.value.data(), A.numel());
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n), "mul");
}

Var Tape::mul_scalar(Var a, Var s) {
  const Tensor& A = value(a);
  const Tensor& S = value(s);
  require(S.numel() == 1, "mul_scalar: scalar operand has shape ", S.shape_str());
  Node n;
  n.op = Op::MulScalar;
  n.value = Tensor(A.rows(), A.cols());
  kern().scale(A.data(), S.item(), n.value.data(), A.numel());
  n.inputs = {a.id, s.id};
  n.requires_grad = node(a).requires_grad || node(s).requires_grad;
  return push(std::move(n), "mul_scalar");
}

Var Tape::concat(const std::vector<Var>& parts, int axis) {
  require(!parts.empty(), "concat: empty input list");
  require(axis == 0 || axis == 1, "concat: axis must be 0 or 1, got ", axis);
  std::size_t rows = value(parts[0]).rows(), cols = value(parts[0]).cols();
  bool rg = false;
  if (axis == 0) {
    rows = 0;
    for (Var p : parts) {
      require(value(p).cols() == cols, "concat axis 0: column mismatch ", value(p).shape_str());
      rows += value(p).rows();
      rg = rg || node(p).requires_grad;
    }
  } else {
    cols = 0;
    for (Var p : parts) {
      require(value(p).rows() == rows, "concat axis 1: row mismatch ", value(p).shape_str());
      cols += value(p).cols();
      rg = rg || node(p).requires_grad;
    }
  }
  Node n;
  n.op = Op::Concat;
  n.axis = axis;
  n.value = Tensor(rows, cols);
  if (axis == 0) {
    std::size_t r0 = 0;
    for (Var p : parts) {
      const Tensor& P = value(p);
      for (std::size_t i = 0; i < P.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) n.value.at(r0 + i, j) = P.at(i, j);
      r0 += P.rows();
    }
  } else {
    std::size_t c0 = 0;
    for (Var p : parts) {
      const Tensor& P = value(p);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < P.cols(); ++j) n.value.at(i, c0 + j) = P.at(i, j);
      c0 += P.cols();
    }
  }
  n.inputs.reserve(parts.size());
  for (Var p : parts) n.inputs.push_back(p.id);
  n.requires_grad = rg;
  return push(std::move(n), "concat");
}

Var Tape::tanh(Var a) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::Tanh;
  n.value = Tensor(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.numel(); ++i) n.value.data()[i] = std::tanh(A.data()[i]);
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "tanh");
}

Var Tape::relu(Var a) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::Relu;
  n.value = Tensor(A.rows(), A.cols());
  kern().relu(A.data(), n.value.data(), A.numel());
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "relu");
}

Var Tape::sigmoid(Var a) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::Sigmoid;
  n.value = Tensor(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.numel(); ++i) {
    double x = A.data()[i];
    // stabilized logistic
    n.value.data()[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                 : std::exp(x) / (1.0 + std::exp(x));
  }
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "sigmoid");
}

Var Tape::softplus(Var a) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::Softplus;
  n.value = Tensor(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.numel(); ++i) n.value.data()[i] = stable_softplus(A.data()[i]);
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "softplus");
}

Var Tape::softmax_rows(Var a) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::SoftmaxRows;
  n.value = Tensor(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double mx = A.at(i, 0);
    for (std::size_t j = 1; j < A.cols(); ++j) mx = std::max(mx, A.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) {
      double e = std::exp(A.at(i, j) - mx);
      n.value.at(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < A.cols(); ++j) n.value.at(i, j) /= sum;
  }
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "softmax_rows");
}

Var Tape::logsumexp_rows(Var a) {
  const Tensor& A = value(a);
  require(A.cols() >= 1, "logsumexp_rows: empty rows");
  Node n;
  n.op = Op::LogSumExpRows;
  n.value = Tensor(A.rows(), 1);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double mx = A.at(i, 0);
    for (std::size_t j = 1; j < A.cols(); ++j) mx = std::max(mx, A.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) sum += std::exp(A.at(i, j) - mx);
    n.value.at(i, 0) = mx + std::log(sum);
  }
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "logsumexp_rows");
}

Var Tape::mean_rows(Var a) {
  const Tensor& A = value(a);
  require(A.rows() >= 1, "mean_rows: empty tensor");
  Node n;
  n.op = Op::MeanRows;
  n.value = Tensor(1, A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) n.value.at(0, j) += A.at(i, j);
  const double inv = 1.0 / static_cast<double>(A.rows());
  for (std::size_t j = 0; j < A.cols(); ++j) n.value.at(0, j) *= inv;
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "mean_rows");
}

Var Tape::row_sum(Var a) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::RowSum;
  n.value = Tensor(A.rows(), 1);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) s += A.at(i, j);
    n.value.at(i, 0) = s;
  }
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "row_sum");
}

Var Tape::scale(Var a, double c) {
  const Tensor& A = value(a);
  Node n;
  n.op = Op::Scale;
  n.scalar = c;
  n.value = Tensor(A.rows(), A.cols());
  kern().scale(A.data(), c, n.value.data(), A.numel());
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "scale");
}

Var Tape::scale_rows(Var a, Var s) {
  const Tensor& A = value(a);
  const Tensor& S = value(s);
  require(S.rows() == A.rows() && S.cols() == 1, "scale_rows: scale must be ", A.rows(),
          "x1, got ", S.shape_str());
  Node n;
  n.op = Op::ScaleRows;
  n.value = Tensor(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    kern().scale(A.row_ptr(i), S.at(i, 0), n.value.row_ptr(i), A.cols());
  n.inputs = {a.id, s.id};
  n.requires_grad = node(a).requires_grad || node(s).requires_grad;
  return push(std::move(n), "scale_rows");
}

Var Tape::dropout(Var a, double p, std::mt19937_64& rng, bool train) {
  require(p >= 0.0 && p < 1.0, "dropout: p must be in [0,1), got ", p);
  if (!train || p == 0.0) return a;  // identity in inference mode
  const Tensor& A = value(a);
  Node n;
  n.op = Op::Dropout;
  n.value = Tensor(A.rows(), A.cols());
  n.aux.resize(A.numel());
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < A.numel(); ++i) {
    n.aux[i] = uniform01(rng) >= p ? keep_scale : 0.0;
    n.value.data()[i] = A.data()[i] * n.aux[i];
  }
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "dropout");
}

Var Tape::gather_rows(Var a, std::vector<std::uint32_t> indices) {
  const Tensor& A = value(a);
  Tensor out(indices.size(), A.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < A.rows(), "gather_rows: row ", indices[i], " out of range ", A.rows());
    for (std::size_t j = 0; j < A.cols(); ++j) out.at(i, j) = A.at(indices[i], j);
  }
  Node n;
  n.op = Op::GatherRows;
  n.value = std::move(out);
  n.indices = std::move(indices);
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n), "gather_rows");
}

Var Tape::scatter_add_rows(Var base, std::vector<std::uint32_t> indices, Var values) {
  const Tensor& B = value(base);
  const Tensor& V = value(values);
  require(V.rows() == indices.size(), "scatter_add_rows: ", indices.size(), " indices vs ",
          V.rows(), " value rows");
  require(V.cols() == B.cols(), "scatter_add_rows: column mismatch ", B.shape_str(), " vs ",
          V.shape_str());
  Node n;
  n.op = Op::ScatterAddRows;
  n.value = B;
  for (std::size_t e = 0; e < indices.size(); ++e) {
    require(indices[e] < B.rows(), "scatter_add_rows: row ", indices[e], " out of range ",
            B.rows());
    kern().axpy(1.0, V.row_ptr(e), n.value.row_ptr(indices[e]), B.cols());
  }
  n.indices = std::move(indices);
  n.inputs = {base.id, values.id};
  n.requires_grad = node(base).requires_grad || node(values).requires_grad;
  return push(std::move(n), "scatter_add_rows");
}

Var Tape::basis_combine(Var coeffs, const std::vector<Var>& bases) {
  const Tensor& C = value(coeffs);
  require(C.rows() == 1 && C.cols() == bases.size(), "basis_combine: coeffs must be 1x",
          bases.size(), ", got ", C.shape_str());
  require(!bases.empty(), "basis_combine: no bases");
  const Tensor& B0 = value(bases[0]);
  Node n;
  n.op = Op::BasisCombine;
  n.value = Tensor(B0.rows(), B0.cols());
  bool rg = node(coeffs).requires_grad;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const Tensor& Vb = value(bases[b]);
    require(Vb.same_shape(B0), "basis_combine: basis ", b, " shape ", Vb.shape_str(),
            " differs from ", B0.shape_str());
    kern().axpy(C.at(0, b), Vb.data(), n.value.data(), n.value.numel());
    rg = rg || node(bases[b]).requires_grad;
  }
  n.inputs.reserve(1 + bases.size());
  n.inputs.push_back(coeffs.id);
  for (Var b : bases) n.inputs.push_back(b.id);
  n.requires_grad = rg;
  return push(std::move(n), "basis_combine");
}

void Tape::add_grad(std::uint32_t id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.empty()) n.grad = Tensor(n.value.rows(), n.value.cols());
  kern().axpy(1.0, g.data(), n.grad.data(), g.numel());
}

void Tape::backward(Var loss) {
  require(!nodes_.empty(), "backward: empty tape");
  require(!backward_done_, "backward: called twice without a fresh forward pass");
  backward_done_ = true;
  Node& ln = node(loss);
  require(ln.value.numel() == 1, "backward: loss must be scalar, got ", ln.value.shape_str());
  if (!ln.requires_grad) return;  // loss independent of all parameters
  ln.grad = Tensor::scalar(1.0);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    backward_node(n);
  }
}

void Tape::backward_node(Node& n) {
  const Tensor& g = n.grad;
  switch (n.op) {
    case Op::Leaf:
    case Op::Param:
    case Op::ParamRows:
      break;
    case Op::MatMul: {
      Node& a = nodes_[n.inputs[0]];
      Node& b = nodes_[n.inputs[1]];
      if (a.requires_grad) {
        Tensor bt = transpose(b.value);
        Tensor da(a.value.rows(), a.value.cols());
        kern().matmul(g.data(), bt.data(), da.data(), g.rows(), g.cols(), bt.cols());
        add_grad(n.inputs[0], da);
      }
      if (b.requires_grad) {
        Tensor at = transpose(a.value);
        Tensor db(b.value.rows(), b.value.cols());
        kern().matmul(at.data(), g.data(), db.data(), at.rows(), at.cols(), g.cols());
        add_grad(n.inputs[1], db);
      }
      break;
    }
    case Op::Add:
      add_grad(n.inputs[0], g);
      add_grad(n.inputs[1], g);
      break;
    case Op::Mul: {
      const Node& a = nodes_[n.inputs[0]];
      const Node& b = nodes_[n.inputs[1]];
      if (a.requires_grad) {
        Tensor da(g.rows(), g.cols());
        kern().hadamard(g.data(), b.value.data(), da.data(), g.numel());
        add_grad(n.inputs[0], da);
      }
      if (b.requires_grad) {
        Tensor db(g.rows(), g.cols());
        kern().hadamard(g.data(), a.value.data(), db.data(), g.numel());
        add_grad(n.inputs[1], db);
      }
      break;
    }
    case Op::MulScalar: {
      const Node& a = nodes_[n.inputs[0]];
      const Node& s = nodes_[n.inputs[1]];
      if (a.requires_grad) {
        Tensor da(g.rows(), g.cols());
        kern().scale(g.data(), s.value.item(), da.data(), g.numel());
        add_grad(n.inputs[0], da);
      }
      if (s.requires_grad) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.numel(); ++i) acc += g.data()[i] * a.value.data()[i];
        add_grad(n.inputs[1], Tensor::scalar(acc));
      }
      break;
    }
    case Op::Concat: {
      if (n.axis == 0) {
        std::size_t r0 = 0;
        for (std::uint32_t in : n.inputs) {
          const Tensor& part = nodes_[in].value;
          Tensor dg(part.rows(), part.cols());
          for (std::size_t i = 0; i < part.rows(); ++i)
            for (std::size_t j = 0; j < part.cols(); ++j) dg.at(i, j) = g.at(r0 + i, j);
          add_grad(in, dg);
          r0 += part.rows();
        }
      } else {
        std::size_t c0 = 0;
        for (std::uint32_t in : n.inputs) {
          const Tensor& part = nodes_[in].value;
          Tensor dg(part.rows(), part.cols());
          for (std::size_t i = 0; i < part.rows(); ++i)
            for (std::size_t j = 0; j < part.cols(); ++j) dg.at(i, j) = g.at(i, c0 + j);
          add_grad(in, dg);
          c0 += part.cols();
        }
      }
      break;
    }
    case Op::Tanh: {
      Tensor dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.numel(); ++i) {
        double y = n.value.data()[i];
        dx.data()[i] = g.data()[i] * (1.0 - y * y);
      }
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::Relu: {
      const Tensor& x = nodes_[n.inputs[0]].value;
      Tensor dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.numel(); ++i)
        dx.data()[i] = x.data()[i] > 0.0 ? g.data()[i] : 0.0;
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::Sigmoid: {
      Tensor dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.numel(); ++i) {
        double y = n.value.data()[i];
        dx.data()[i] = g.data()[i] * y * (1.0 - y);
      }
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::Softplus: {
      const Tensor& x = nodes_[n.inputs[0]].value;
      Tensor dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.numel(); ++i) {
        double v = x.data()[i];
        double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
        dx.data()[i] = g.data()[i] * s;
      }
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::SoftmaxRows: {
      Tensor dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) dot += g.at(i, j) * n.value.at(i, j);
        for (std::size_t j = 0; j < g.cols(); ++j)
          dx.at(i, j) = n.value.at(i, j) * (g.at(i, j) - dot);
      }
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::LogSumExpRows: {
      const Tensor& x = nodes_[n.inputs[0]].value;
      Tensor dx(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
          dx.at(i, j) = g.at(i, 0) * std::exp(x.at(i, j) - n.value.at(i, 0));
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::MeanRows: {
      const Tensor& x = nodes_[n.inputs[0]].value;
      Tensor dx(x.rows(), x.cols());
      const double inv = 1.0 / static_cast<double>(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) dx.at(i, j) = g.at(0, j) * inv;
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::RowSum: {
      const Tensor& x = nodes_[n.inputs[0]].value;
      Tensor dx(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) dx.at(i, j) = g.at(i, 0);
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::Scale: {
      Tensor dx(g.rows(), g.cols());
      kern().scale(g.data(), n.scalar, dx.data(), g.numel());
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::ScaleRows: {
      const Node& a = nodes_[n.inputs[0]];
      const Node& s = nodes_[n.inputs[1]];
      if (a.requires_grad) {
        Tensor da(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
          kern().scale(g.row_ptr(i), s.value.at(i, 0), da.row_ptr(i), g.cols());
        add_grad(n.inputs[0], da);
      }
      if (s.requires_grad) {
        Tensor ds(g.rows(), 1);
        for (std::size_t i = 0; i < g.rows(); ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < g.cols(); ++j) acc += g.at(i, j) * a.value.at(i, j);
          ds.at(i, 0) = acc;
        }
        add_grad(n.inputs[1], ds);
      }
      break;
    }
    case Op::Dropout: {
      Tensor dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.numel(); ++i) dx.data()[i] = g.data()[i] * n.aux[i];
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::GatherRows: {
      const Tensor& x = nodes_[n.inputs[0]].value;
      Tensor dx(x.rows(), x.cols());
      for (std::size_t i = 0; i < n.indices.size(); ++i)
        kern().axpy(1.0, g.row_ptr(i), dx.row_ptr(n.indices[i]), x.cols());
      add_grad(n.inputs[0], dx);
      break;
    }
    case Op::ScatterAddRows: {
      add_grad(n.inputs[0], g);
      const Node& v = nodes_[n.inputs[1]];
      if (v.requires_grad) {
        Tensor dv(v.value.rows(), v.value.cols());
        for (std::size_t e = 0; e < n.indices.size(); ++e)
          for (std::size_t j = 0; j < dv.cols(); ++j) dv.at(e, j) = g.at(n.indices[e], j);
        add_grad(n.inputs[1], dv);
      }
      break;
    }
    case Op::BasisCombine: {
      const Node& c = nodes_[n.inputs[0]];
      const std::size_t nb = n.inputs.size() - 1;
      if (c.requires_grad) {
        Tensor dc(1, nb);
        for (std::size_t b = 0; b < nb; ++b) {
          const Tensor& vb = nodes_[n.inputs[1 + b]].value;
          double acc = 0.0;
          for (std::size_t i = 0; i < g.numel(); ++i) acc += g.data()[i] * vb.data()[i];
          dc.at(0, b) = acc;
        }
        add_grad(n.inputs[0], dc);
      }
      for (std::size_t b = 0; b < nb; ++b) {
        if (!nodes_[n.inputs[1 + b]].requires_grad) continue;
        Tensor db(g.rows(), g.cols());
        kern().scale(g.data(), c.value.at(0, b), db.data(), g.numel());
        add_grad(n.inputs[1 + b], db);
      }
      break;
    }
  }
}

void Tape::accumulate_param_grads() {
  for (Node& n : nodes_) {
    if (n.grad.empty() || n.bound == nullptr) continue;
    Tensor& target = *n.bound;
    target.ensure_grad();
    if (n.op == Op::Param) {
      kern().axpy(1.0, n.grad.data(), target.grad().data(), n.grad.numel());
    } else if (n.op == Op::ParamRows) {
      for (std::size_t i = 0; i < n.indices.size(); ++i)
        kern().axpy(1.0, n.grad.row_ptr(i),
                    target.grad().data() + static_cast<std::size_t>(n.indices[i]) * target.cols(),
                    target.cols());
    }
  }
}

Tensor Tape::grad_of(Var v) const {
  const Node& n = node(v);
  if (n.grad.empty()) return Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

}  // namespace kgddi::tensor
