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
#include "smgan/nn.hpp"

#include <cmath>
#include <cstring>

#include "smgan/error.hpp"
#include "smgan/kernels.hpp"

namespace smgan {

std::string_view to_string(HiddenActivation a) {
  return a == HiddenActivation::kRelu ? "relu" : "leaky_relu";
}

std::string_view to_string(OutputActivation a) {
  return a == OutputActivation::kIdentity ? "identity" : "tanh";
}

HiddenActivation parse_hidden_activation(std::string_view s) {
  if (s == "relu") return HiddenActivation::kRelu;
  if (s == "leaky_relu") return HiddenActivation::kLeakyRelu;
  throw ContractViolation("unknown hidden activation '" + std::string(s) +
                          "' (expected relu | leaky_relu)");
}

OutputActivation parse_output_activation(std::string_view s) {
  if (s == "identity") return OutputActivation::kIdentity;
  if (s == "tanh") return OutputActivation::kTanh;
  throw ContractViolation("unknown output activation '" + std::string(s) +
                          "' (expected identity | tanh)");
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw ContractViolation("MlpSpec needs at least an input and an output size");
  }
  for (std::size_t d : layer_sizes) {
    if (d == 0) throw ContractViolation("MlpSpec layer sizes must be positive");
  }
}

std::vector<Tensor*> MlpParams::tensors() {
  std::vector<Tensor*> out;
  out.reserve(layers.size() * 2);
  for (Layer& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Tensor*> MlpParams::tensors() const {
  std::vector<const Tensor*> out;
  out.reserve(layers.size() * 2);
  for (const Layer& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<std::string> MlpParams::tensor_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out.push_back("layer" + std::to_string(i) + ".weight");
    out.push_back("layer" + std::to_string(i) + ".bias");
  }
  return out;
}

bool MlpParams::all_finite() const {
  for (const Tensor* t : tensors()) {
    if (!t->all_finite()) return false;
  }
  return true;
}

std::uint64_t MlpParams::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Tensor* t : tensors()) {
    for (double v : t->data()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

MlpParams zero_params(const MlpSpec& spec) {
  spec.validate();
  MlpParams p;
  for (std::size_t i = 0; i + 1 < spec.layer_sizes.size(); ++i) {
    const std::size_t in = spec.layer_sizes[i];
    const std::size_t out = spec.layer_sizes[i + 1];
    p.layers.push_back({Tensor({out, in}), Tensor({out})});
  }
  return p;
}

MlpParams init_params(const MlpSpec& spec, std::uint64_t seed) {
  MlpParams p = zero_params(spec);
  Rng rng = make_rng(seed, 0x1417);
  for (Layer& l : p.layers) {
    const double fan_out = static_cast<double>(l.weight.rows());
    const double fan_in = static_cast<double>(l.weight.cols());
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-s, s);
    for (double& w : l.weight.data()) w = u(rng);
  }
  return p;
}

std::vector<Var> bind_params(Graph& g, const MlpParams& params, bool trainable) {
  std::vector<Var> out;
  for (const Tensor* t : params.tensors()) {
    out.push_back(trainable ? g.parameter(*t) : g.input(*t));
  }
  return out;
}

Var forward(const MlpSpec& spec, std::span<const Var> params, Var x) {
  spec.validate();
  if (params.size() != 2 * spec.num_layers()) {
    throw DimensionError("forward: expected " + std::to_string(2 * spec.num_layers()) +
                         " parameter tensors, got " + std::to_string(params.size()));
  }
  if (x.value().rank() != 2 || x.value().cols() != spec.input_dim()) {
    throw DimensionError("forward: input " + shape_string(x.shape()) +
                         " does not have " + std::to_string(spec.input_dim()) + " columns");
  }
  Var h = x;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    h = linear(h, params[2 * l], params[2 * l + 1]);
    const bool last = l + 1 == spec.num_layers();
    if (!last) {
      h = spec.hidden_activation == HiddenActivation::kRelu ? relu(h)
                                                            : leaky_relu(h, spec.leaky_slope);
    } else if (spec.output_activation == OutputActivation::kTanh) {
      h = tanh(h);
    }
  }
  return h;
}

Tensor forward(const MlpSpec& spec, const MlpParams& params, const Tensor& x) {
  Graph g;
  const std::vector<Var> bound = bind_params(g, params, false);
  return forward(spec, bound, g.input(x)).value();
}

AdamState::AdamState(const MlpParams& params, AdamConfig cfg) : config(cfg) {
  for (const Tensor* t : params.tensors()) {
    first_moment.emplace_back(t->shape());
    second_moment.emplace_back(t->shape());
  }
}

void adam_step(MlpParams& params, std::span<const Tensor> grads, AdamState& state) {
  std::vector<Tensor*> ts = params.tensors();
  if (grads.size() != ts.size() || state.first_moment.size() != ts.size()) {
    throw DimensionError("adam_step: " + std::to_string(ts.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " +
                         std::to_string(state.first_moment.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (grads[i].shape() != ts[i]->shape() || state.first_moment[i].shape() != ts[i]->shape()) {
      throw DimensionError("adam_step: gradient " + shape_string(grads[i].shape()) +
                           " does not match parameter " + shape_string(ts[i]->shape()));
    }
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  kernels::AdamCoeffs c;
  c.lr = state.config.lr;
  c.beta1 = state.config.beta1;
  c.beta2 = state.config.beta2;
  c.eps = state.config.eps;
  c.bias1 = 1.0 - std::pow(c.beta1, t);
  c.bias2 = 1.0 - std::pow(c.beta2, t);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    k.adam(ts[i]->data().data(), grads[i].data().data(), state.first_moment[i].data().data(),
           state.second_moment[i].data().data(), ts[i]->size(), c);
  }
}

LatentSampler::LatentSampler(std::size_t dim, std::uint64_t seed)
    : dim_(dim), rng_(make_rng(seed, 0x2a7e)) {
  if (dim == 0) throw ContractViolation("LatentSampler dimension must be >= 1");
}

Tensor LatentSampler::sample(std::size_t n) {
  if (n == 0) throw ContractViolation("sample_latent needs n >= 1");
  Tensor z({n, dim_});
  for (double& v : z.data()) v = normal_(rng_);
  return z;
}

}  // namespace smgan
