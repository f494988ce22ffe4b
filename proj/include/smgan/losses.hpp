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

// Batch-level softmax cross-entropy losses. Scores are discriminator
// outputs μ(x); a lower score means more mass under the batch softmax
// s(x) = e^{-μ(x)} / Z_B with Z_B = Σ_{x∈B} e^{-μ(x)}.
//
//   L_D = (1/|B₊|) Σ_{B₊} μ + ln Z_B        target t_D: 1/|B₊| on reals, 0 on fakes
//   L_G = (1/|B|)  Σ_{B}  μ + ln Z_B        target t_G: 1/|B| everywhere
//
// Both are cross-entropies −Σ t ln s, so ∂L/∂μ(y) = t(y) − s(y).

#include <span>
#include <vector>

#include "smgan/autodiff.hpp"

namespace smgan {

// Scores of one minibatch B = B₊ ∪ B₋. Real entries come first wherever the
// two halves are concatenated.
struct Batch {
  std::vector<double> real_scores;
  std::vector<double> fake_scores;

  std::size_t size() const { return real_scores.size() + fake_scores.size(); }
  std::vector<double> concatenated() const;
  // Throws ContractViolation on an empty side or a non-finite score.
  void validate() const;
};

struct SoftmaxTargets {
  std::vector<double> t_d;
  std::vector<double> t_g;
};

SoftmaxTargets softmax_targets(std::size_t num_real, std::size_t num_fake);

struct LossWithGrad {
  double value = 0.0;
  // ∂L/∂μ over the concatenated batch, reals first.
  std::vector<double> grad;
};

// s = exp(−μ − log_sum_exp(−μ)).
std::vector<double> batch_softmax(std::span<const double> scores);
// ln Z_B = log_sum_exp(−μ).
double log_partition(std::span<const double> scores);

LossWithGrad d_loss_softmax(const Batch& batch);
LossWithGrad g_loss_softmax(const Batch& batch);

// Logistic baseline. Logits are "realness": large positive means real.
//   D: mean softplus(−ℓ_real) + mean softplus(ℓ_fake)
//   G (non-saturating): mean softplus(−ℓ_fake)
double softplus(double x);
double d_loss_gan_baseline(std::span<const double> logits_real,
                           std::span<const double> logits_fake);
double g_loss_gan_nonsaturating(std::span<const double> logits_fake);

// Graph versions. Score tensors may be n or n×1.
Var d_loss_softmax(Var real_scores, Var fake_scores);
Var g_loss_softmax(Var real_scores, Var fake_scores);
Var log_partition(Var real_scores, Var fake_scores);
Var d_loss_gan_baseline(Var logits_real, Var logits_fake);
Var g_loss_gan_nonsaturating(Var logits_fake);

}  // namespace smgan
