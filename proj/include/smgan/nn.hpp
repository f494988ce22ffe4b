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

// Multilayer perceptrons for the discriminator and generator, their
// initialization, and the Adam optimizer. No normalization layers.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smgan/autodiff.hpp"
#include "smgan/random.hpp"
#include "smgan/tensor.hpp"

namespace smgan {

enum class HiddenActivation { kRelu, kLeakyRelu };
enum class OutputActivation { kIdentity, kTanh };

std::string_view to_string(HiddenActivation a);
std::string_view to_string(OutputActivation a);
HiddenActivation parse_hidden_activation(std::string_view s);
OutputActivation parse_output_activation(std::string_view s);

struct MlpSpec {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  HiddenActivation hidden_activation = HiddenActivation::kLeakyRelu;
  OutputActivation output_activation = OutputActivation::kIdentity;
  double leaky_slope = kDefaultLeakySlope;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  // Throws ContractViolation on fewer than two sizes or a zero size.
  void validate() const;
};

struct Layer {
  Tensor weight;  // out × in
  Tensor bias;    // out

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct MlpParams {
  std::vector<Layer> layers;

  // weight0, bias0, weight1, bias1, ...
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::vector<std::string> tensor_names() const;
  bool all_finite() const;
  // FNV-1a over the raw bytes of every entry; cheap change detection.
  std::uint64_t fingerprint() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// Glorot-uniform weights in ±√(6/(fan_in+fan_out)), zero biases.
MlpParams init_params(const MlpSpec& spec, std::uint64_t seed);
MlpParams zero_params(const MlpSpec& spec);

// Leaves for each parameter tensor, in tensors() order.
std::vector<Var> bind_params(Graph& g, const MlpParams& params, bool trainable);

Var forward(const MlpSpec& spec, std::span<const Var> params, Var x);
// Pure evaluation with no gradient bookkeeping.
Tensor forward(const MlpSpec& spec, const MlpParams& params, const Tensor& x);

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(const MlpParams& params, AdamConfig cfg);
};

// One bias-corrected Adam step. `grads` follow MlpParams::tensors() order.
void adam_step(MlpParams& params, std::span<const Tensor> grads, AdamState& state);

class LatentSampler {
 public:
  LatentSampler(std::size_t dim, std::uint64_t seed);
  // n × dim standard normal draws; advances the stream.
  Tensor sample(std::size_t n);
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace smgan
