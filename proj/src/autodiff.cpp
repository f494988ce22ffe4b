/* Copyright 2026 The smgan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "smgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smgan/error.hpp"
#include "smgan/kernels.hpp"

namespace smgan {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatmul: return "matmul";
    case Op::kLinear: return "linear";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kAddBias: return "add_bias";
    case Op::kRelu: return "relu";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kTanh: return "tanh";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kNeg: return "neg";
    case Op::kScale: return "scale";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kLogSumExp: return "log_sum_exp";
    case Op::kSoftplus: return "softplus";
    case Op::kConcatRows: return "concat_rows";
    case Op::kSliceRows: return "slice_rows";
  }
  return "unknown";
}

const Tensor& Var::value() const { return graph_->value(*this); }
const Tensor& Var::grad() const { return graph_->grad(*this); }

Var Graph::parameter(Tensor value) {
  GraphNode n;
  n.id = nodes_.size();
  n.op = Op::kLeaf;
  n.requires_grad = true;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::input(Tensor value) {
  GraphNode n;
  n.id = nodes_.size();
  n.op = Op::kLeaf;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::push(Op op, Tensor value, std::initializer_list<Var> parents,
                double attr, std::size_t row_begin, std::size_t row_end) {
  GraphNode n;
  n.id = nodes_.size();
  n.op = op;
  n.value = std::move(value);
  n.attr = attr;
  n.row_begin = row_begin;
  n.row_end = row_end;
  for (const Var& p : parents) {
    if (p.graph() != this) {
      throw ContractViolation("operand belongs to a different graph");
    }
    n.parent_ids[n.num_parents++] = p.id();
    n.requires_grad = n.requires_grad || nodes_[p.id()].requires_grad;
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Graph::grad(Var v) const {
  const GraphNode& n = node(v.id());
  if (n.grad.size() == n.value.size()) return n.grad;
  if (zero_grads_.size() < nodes_.size()) zero_grads_.resize(nodes_.size());
  Tensor& z = zero_grads_[v.id()];
  if (z.shape() != n.value.shape()) z = Tensor(n.value.shape());
  return z;
}

Tensor& Graph::grad_slot(std::size_t id) { return nodes_[id].grad; }

void Graph::backward(Var root) {
  if (root.graph() != this) throw ContractViolation("root belongs to a different graph");
  const GraphNode& r = node(root.id());
  if (!r.value.is_scalar()) {
    throw ContractViolation("backward() needs a scalar root, got shape " +
                            shape_string(r.value.shape()));
  }
  for (std::size_t i = 0; i <= root.id(); ++i) {
    GraphNode& n = nodes_[i];
    if (n.requires_grad) {
      if (n.grad.shape() != n.value.shape()) {
        n.grad = Tensor(n.value.shape());
      } else {
        n.grad.fill(0.0);
      }
    } else {
      n.grad = Tensor();
    }
  }
  for (std::size_t i = root.id() + 1; i < nodes_.size(); ++i) nodes_[i].grad = Tensor();
  if (!r.requires_grad) return;
  nodes_[root.id()].grad[0] = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    const GraphNode& n = nodes_[i];
    if (n.requires_grad && n.op != Op::kLeaf) backprop_node(n);
  }
}

namespace {

bool wants(const std::vector<GraphNode>& nodes, std::size_t id) {
  return nodes[id].requires_grad;
}

}  // namespace

void Graph::backprop_node(const GraphNode& n) {
  const auto& k = kernels::active();
  const Tensor& dy = n.grad;
  const auto p = n.parents();
  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kMatmul: {
      const Tensor& a = nodes_[p[0]].value;
      const Tensor& b = nodes_[p[1]].value;
      const std::size_t m = a.rows(), kk = a.cols(), nn = b.cols();
      if (wants(nodes_, p[0])) {
        k.gemm_nt(dy.data().data(), b.data().data(), grad_slot(p[0]).data().data(), m, nn, kk);
      }
      if (wants(nodes_, p[1])) {
        k.gemm_tn(a.data().data(), dy.data().data(), grad_slot(p[1]).data().data(), kk, m, nn);
      }
      break;
    }
    case Op::kLinear: {
      const Tensor& x = nodes_[p[0]].value;
      const Tensor& w = nodes_[p[1]].value;
      const std::size_t batch = x.rows(), in = x.cols(), out = w.rows();
      if (wants(nodes_, p[0])) {
        k.gemm_nn(dy.data().data(), w.data().data(), grad_slot(p[0]).data().data(), batch, out, in);
      }
      if (wants(nodes_, p[1])) {
        k.gemm_tn(dy.data().data(), x.data().data(), grad_slot(p[1]).data().data(), out, batch, in);
      }
      if (wants(nodes_, p[2])) {
        double* db = grad_slot(p[2]).data().data();
        for (std::size_t r = 0; r < batch; ++r) {
          for (std::size_t c = 0; c < out; ++c) db[c] += dy[r * out + c];
        }
      }
      break;
    }
    case Op::kAdd:
    case Op::kSub: {
      const double sign = n.op == Op::kAdd ? 1.0 : -1.0;
      if (wants(nodes_, p[0])) k.axpy(1.0, dy.data().data(), grad_slot(p[0]).data().data(), dy.size());
      if (wants(nodes_, p[1])) k.axpy(sign, dy.data().data(), grad_slot(p[1]).data().data(), dy.size());
      break;
    }
    case Op::kMul: {
      const Tensor& a = nodes_[p[0]].value;
      const Tensor& b = nodes_[p[1]].value;
      if (wants(nodes_, p[0])) {
        Tensor& ga = grad_slot(p[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga[i] += dy[i] * b[i];
      }
      if (wants(nodes_, p[1])) {
        Tensor& gb = grad_slot(p[1]);
        for (std::size_t i = 0; i < dy.size(); ++i) gb[i] += dy[i] * a[i];
      }
      break;
    }
    case Op::kAddBias: {
      if (wants(nodes_, p[0])) k.axpy(1.0, dy.data().data(), grad_slot(p[0]).data().data(), dy.size());
      if (wants(nodes_, p[1])) {
        Tensor& gb = grad_slot(p[1]);
        const std::size_t cols = gb.size();
        for (std::size_t i = 0; i < dy.size(); ++i) gb[i % cols] += dy[i];
      }
      break;
    }
    case Op::kRelu:
    case Op::kLeakyRelu: {
      const Tensor& x = nodes_[p[0]].value;
      k.leaky_relu_grad(x.data().data(), dy.data().data(), grad_slot(p[0]).data().data(),
                        dy.size(), n.op == Op::kRelu ? 0.0 : n.attr);
      break;
    }
    case Op::kTanh: {
      Tensor& gx = grad_slot(p[0]);
      for (std::size_t i = 0; i < dy.size(); ++i) {
        const double y = n.value[i];
        gx[i] += dy[i] * (1.0 - y * y);
      }
      break;
    }
    case Op::kExp: {
      Tensor& gx = grad_slot(p[0]);
      for (std::size_t i = 0; i < dy.size(); ++i) gx[i] += dy[i] * n.value[i];
      break;
    }
    case Op::kLog: {
      const Tensor& x = nodes_[p[0]].value;
      Tensor& gx = grad_slot(p[0]);
      for (std::size_t i = 0; i < dy.size(); ++i) gx[i] += dy[i] / x[i];
      break;
    }
    case Op::kNeg:
      k.axpy(-1.0, dy.data().data(), grad_slot(p[0]).data().data(), dy.size());
      break;
    case Op::kScale:
      k.axpy(n.attr, dy.data().data(), grad_slot(p[0]).data().data(), dy.size());
      break;
    case Op::kSoftplus: {
      const Tensor& x = nodes_[p[0]].value;
      Tensor& gx = grad_slot(p[0]);
      for (std::size_t i = 0; i < dy.size(); ++i) {
        // sigmoid(x), evaluated without overflow on either side.
        const double e = std::exp(-std::abs(x[i]));
        const double sig = x[i] >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
        gx[i] += dy[i] * sig;
      }
      break;
    }
    case Op::kSum:
    case Op::kMean: {
      Tensor& gx = grad_slot(p[0]);
      const double g = n.op == Op::kSum ? dy[0] : dy[0] / static_cast<double>(gx.size());
      for (double& v : gx.data()) v += g;
      break;
    }
    case Op::kLogSumExp: {
      const Tensor& x = nodes_[p[0]].value;
      Tensor& gx = grad_slot(p[0]);
      const double lse = n.value[0];
      for (std::size_t i = 0; i < x.size(); ++i) gx[i] += dy[0] * std::exp(x[i] - lse);
      break;
    }
    case Op::kConcatRows: {
      const std::size_t na = nodes_[p[0]].value.size();
      if (wants(nodes_, p[0])) k.axpy(1.0, dy.data().data(), grad_slot(p[0]).data().data(), na);
      if (wants(nodes_, p[1])) {
        k.axpy(1.0, dy.data().data() + na, grad_slot(p[1]).data().data(), dy.size() - na);
      }
      break;
    }
    case Op::kSliceRows: {
      const Tensor& x = nodes_[p[0]].value;
      const std::size_t width = x.rank() == 1 ? 1 : x.cols();
      const std::size_t offset = n.row_begin * width;
      k.axpy(1.0, dy.data().data(), grad_slot(p[0]).data().data() + offset, dy.size());
      break;
    }
  }
}

namespace {

Graph& graph_of(Var a) {
  if (!a.valid()) throw ContractViolation("operation on an unbound Var");
  return *a.graph();
}

void require_same_shape(const char* op, Var a, Var b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_matrix(const char* op, const Tensor& t) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got " +
                         shape_string(t.shape()));
  }
}

template <typename F>
Tensor map_values(const Tensor& x, F f) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return y;
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_matrix("matmul", av);
  require_matrix("matmul", bv);
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: inner dimensions disagree " +
                         shape_string(av.shape()) + " x " + shape_string(bv.shape()));
  }
  Tensor c({av.rows(), bv.cols()});
  kernels::active().gemm_nn(av.data().data(), bv.data().data(), c.data().data(),
                            av.rows(), av.cols(), bv.cols());
  return graph_of(a).push(Op::kMatmul, std::move(c), {a, b});
}

Var linear(Var x, Var weight, Var bias) {
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  const Tensor& bv = bias.value();
  require_matrix("linear", xv);
  require_matrix("linear", wv);
  if (xv.cols() != wv.cols() || bv.size() != wv.rows()) {
    throw DimensionError("linear: input " + shape_string(xv.shape()) + ", weight " +
                         shape_string(wv.shape()) + ", bias " + shape_string(bv.shape()));
  }
  const std::size_t batch = xv.rows(), in = xv.cols(), out = wv.rows();
  Tensor y({batch, out});
  for (std::size_t r = 0; r < batch; ++r) {
    std::copy(bv.data().begin(), bv.data().end(), y.data().begin() + r * out);
  }
  kernels::active().gemm_nt(xv.data().data(), wv.data().data(), y.data().data(), batch, in, out);
  return graph_of(x).push(Op::kLinear, std::move(y), {x, weight, bias});
}

Var add(Var a, Var b) {
  require_same_shape("add", a, b);
  Tensor y = a.value();
  kernels::active().axpy(1.0, b.value().data().data(), y.data().data(), y.size());
  return graph_of(a).push(Op::kAdd, std::move(y), {a, b});
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a, b);
  Tensor y = a.value();
  kernels::active().axpy(-1.0, b.value().data().data(), y.data().data(), y.size());
  return graph_of(a).push(Op::kSub, std::move(y), {a, b});
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a, b);
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return graph_of(a).push(Op::kMul, std::move(y), {a, b});
}

Var add_bias(Var x, Var bias) {
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.rank() != 1 || bv.size() != xv.cols()) {
    throw DimensionError("add_bias: bias " + shape_string(bv.shape()) +
                         " does not match columns of " + shape_string(xv.shape()));
  }
  Tensor y = xv;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i % bv.size()];
  return graph_of(x).push(Op::kAddBias, std::move(y), {x, bias});
}

Var relu(Var x) {
  Tensor y(x.shape());
  kernels::active().leaky_relu(x.value().data().data(), y.data().data(), y.size(), 0.0);
  return graph_of(x).push(Op::kRelu, std::move(y), {x});
}

Var leaky_relu(Var x, double slope) {
  Tensor y(x.shape());
  kernels::active().leaky_relu(x.value().data().data(), y.data().data(), y.size(), slope);
  return graph_of(x).push(Op::kLeakyRelu, std::move(y), {x}, slope);
}

Var tanh(Var x) {
  return graph_of(x).push(Op::kTanh, map_values(x.value(), [](double v) { return std::tanh(v); }), {x});
}

Var exp(Var x) {
  return graph_of(x).push(Op::kExp, map_values(x.value(), [](double v) { return std::exp(v); }), {x});
}

Var log(Var x) {
  const Tensor& xv = x.value();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    if (!(xv[i] > 0.0)) {
      throw DomainError("log: entry " + std::to_string(i) + " is non-positive (" +
                        std::to_string(xv[i]) + ")");
    }
  }
  return graph_of(x).push(Op::kLog, map_values(xv, [](double v) { return std::log(v); }), {x});
}

Var neg(Var x) {
  return graph_of(x).push(Op::kNeg, map_values(x.value(), [](double v) { return -v; }), {x});
}

Var scale(Var x, double factor) {
  return graph_of(x).push(Op::kScale,
                          map_values(x.value(), [factor](double v) { return factor * v; }),
                          {x}, factor);
}

Var softplus(Var x) {
  return graph_of(x).push(Op::kSoftplus, map_values(x.value(), [](double v) {
                            return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
                          }),
                          {x});
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return graph_of(x).push(Op::kSum, Tensor::scalar(s), {x});
}

Var mean(Var x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return graph_of(x).push(Op::kMean, Tensor::scalar(s / static_cast<double>(x.value().size())), {x});
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("log_sum_exp of an empty input");
  const double mx = *std::max_element(x.begin(), x.end());
  if (std::isinf(mx)) return mx;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

std::vector<double> softmax(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("softmax of an empty input");
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += out[i] = std::exp(x[i] - mx);
  for (double& v : out) v /= s;
  return out;
}

Var log_sum_exp(Var x) {
  const double v = log_sum_exp(x.value().data());
  return graph_of(x).push(Op::kLogSumExp, Tensor::scalar(v), {x});
}

Var concat_rows(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Shape shape;
  if (av.rank() == 1 && bv.rank() == 1) {
    shape = {av.size() + bv.size()};
  } else if (av.rank() == 2 && bv.rank() == 2 && av.cols() == bv.cols()) {
    shape = {av.rows() + bv.rows(), av.cols()};
  } else {
    throw DimensionError("concat_rows: incompatible shapes " + shape_string(av.shape()) +
                         " and " + shape_string(bv.shape()));
  }
  std::vector<double> data;
  data.reserve(av.size() + bv.size());
  data.insert(data.end(), av.data().begin(), av.data().end());
  data.insert(data.end(), bv.data().begin(), bv.data().end());
  return graph_of(a).push(Op::kConcatRows, Tensor(std::move(shape), std::move(data)), {a, b});
}

Var slice_rows(Var x, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  const std::size_t nrows = xv.rank() == 1 ? xv.size() : xv.rows();
  if (begin >= end || end > nrows) {
    throw DimensionError("slice_rows: range [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ") outside " + shape_string(xv.shape()));
  }
  const std::size_t width = xv.rank() == 1 ? 1 : xv.cols();
  Shape shape = xv.rank() == 1 ? Shape{end - begin} : Shape{end - begin, width};
  std::vector<double> data(xv.data().begin() + begin * width, xv.data().begin() + end * width);
  return graph_of(x).push(Op::kSliceRows, Tensor(std::move(shape), std::move(data)), {x},
                          0.0, begin, end);
}

}  // namespace smgan
