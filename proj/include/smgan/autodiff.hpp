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
#pragma once

// Define-by-run reverse-mode differentiation. A Graph is a tape: every
// operation appends one node whose parents already exist, so node order is
// a topological order and backward() is a single reverse sweep.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smgan/tensor.hpp"

namespace smgan {

enum class Op : std::uint8_t {
  kLeaf,
  kMatmul,
  kLinear,
  kAdd,
  kSub,
  kMul,
  kAddBias,
  kRelu,
  kLeakyRelu,
  kTanh,
  kExp,
  kLog,
  kNeg,
  kScale,
  kSum,
  kMean,
  kLogSumExp,
  kSoftplus,
  kConcatRows,
  kSliceRows,
};

std::string_view op_name(Op op);

inline constexpr double kDefaultLeakySlope = 0.2;

struct GraphNode {
  std::size_t id = 0;
  Op op = Op::kLeaf;
  std::array<std::size_t, 3> parent_ids{};
  std::uint8_t num_parents = 0;
  bool requires_grad = false;
  Tensor value;
  Tensor grad;  // allocated by backward() for nodes that require it
  // Op attributes: slope for leaky relu, factor for scale, row range for
  // slicing.
  double attr = 0.0;
  std::size_t row_begin = 0;
  std::size_t row_end = 0;

  std::span<const std::size_t> parents() const {
    return {parent_ids.data(), num_parents};
  }
};

class Graph;

// Lightweight handle to a node of a Graph. Valid as long as the graph is.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph() const noexcept { return graph_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return graph_ != nullptr; }

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }

 private:
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  // A leaf whose gradient backward() will report.
  Var parameter(Tensor value);
  // A leaf treated as a constant.
  Var input(Tensor value);

  // Reverse sweep from a scalar root. Populates the gradient of the root
  // with respect to every node that requires one; paths accumulate. Calling
  // it again resets previous gradients first.
  void backward(Var root);

  const GraphNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  const Tensor& value(Var v) const { return node(v.id()).value; }
  // Gradient from the last backward(); zeros for nodes that did not require
  // one or were unreachable from the root.
  const Tensor& grad(Var v) const;

  // Appends a node. Used by the op functions below; parents must belong to
  // this graph.
  Var push(Op op, Tensor value, std::initializer_list<Var> parents,
           double attr = 0.0, std::size_t row_begin = 0,
           std::size_t row_end = 0);

 private:
  void backprop_node(const GraphNode& n);
  Tensor& grad_slot(std::size_t id);

  std::vector<GraphNode> nodes_;
  mutable std::vector<Tensor> zero_grads_;
};

// a[m×k] · b[k×n]
Var matmul(Var a, Var b);
// x[batch×in] · weightᵀ + bias, with weight[out×in] and bias[out].
Var linear(Var x, Var weight, Var bias);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// x[rows×cols] + bias[cols] broadcast along rows.
Var add_bias(Var x, Var bias);

Var relu(Var x);
Var leaky_relu(Var x, double slope = kDefaultLeakySlope);
Var tanh(Var x);
Var exp(Var x);
// Throws DomainError naming the first non-positive entry.
Var log(Var x);
Var neg(Var x);
Var scale(Var x, double factor);
// max(x,0) + log1p(exp(-|x|))
Var softplus(Var x);

// Reductions over every entry; result is a scalar.
Var sum(Var x);
Var mean(Var x);
// max(x) + ln Σ exp(x - max(x)). The only place the graph exponentiates
// unbounded values before normalizing.
Var log_sum_exp(Var x);

// Stacks rows (rank-2 with matching columns) or concatenates rank-1
// vectors.
Var concat_rows(Var a, Var b);
// Rows [begin, end) of a rank-2 tensor, or entries of a rank-1 tensor.
Var slice_rows(Var x, std::size_t begin, std::size_t end);

// Stand-alone numeric helper used outside graphs.
double log_sum_exp(std::span<const double> x);
// exp(x − max) / Σ exp(x − max)
std::vector<double> softmax(std::span<const double> x);

}  // namespace smgan
