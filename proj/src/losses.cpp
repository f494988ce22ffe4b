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
#include "smgan/losses.hpp"

#include <cmath>
#include <string>

#include "smgan/error.hpp"

namespace smgan {

std::vector<double> Batch::concatenated() const {
  std::vector<double> all(real_scores);
  all.insert(all.end(), fake_scores.begin(), fake_scores.end());
  return all;
}

void Batch::validate() const {
  if (real_scores.empty() || fake_scores.empty()) {
    throw ContractViolation("batch needs at least one real and one fake sample (got " +
                            std::to_string(real_scores.size()) + " real, " +
                            std::to_string(fake_scores.size()) + " fake)");
  }
  for (double v : real_scores) {
    if (!std::isfinite(v)) throw ContractViolation("non-finite real score");
  }
  for (double v : fake_scores) {
    if (!std::isfinite(v)) throw ContractViolation("non-finite fake score");
  }
}

SoftmaxTargets softmax_targets(std::size_t num_real, std::size_t num_fake) {
  if (num_real == 0 || num_fake == 0) {
    throw ContractViolation("softmax targets need non-empty B+ and B-");
  }
  const std::size_t n = num_real + num_fake;
  SoftmaxTargets t;
  t.t_d.assign(n, 0.0);
  for (std::size_t i = 0; i < num_real; ++i) t.t_d[i] = 1.0 / static_cast<double>(num_real);
  t.t_g.assign(n, 1.0 / static_cast<double>(n));
  return t;
}

double log_partition(std::span<const double> scores) {
  std::vector<double> negated(scores.begin(), scores.end());
  for (double& v : negated) v = -v;
  return log_sum_exp(negated);
}

std::vector<double> batch_softmax(std::span<const double> scores) {
  if (scores.empty()) throw ContractViolation("batch_softmax of an empty batch");
  std::vector<double> neg(scores.begin(), scores.end());
  for (double& v : neg) v = -v;
  return softmax(neg);
}

namespace {

LossWithGrad cross_entropy(const std::vector<double>& scores, const std::vector<double>& target) {
  const std::vector<double> s = batch_softmax(scores);
  LossWithGrad out;
  out.value = log_partition(scores);
  out.grad.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.value += target[i] * scores[i];
    out.grad[i] = target[i] - s[i];
  }
  return out;
}

}  // namespace

LossWithGrad d_loss_softmax(const Batch& batch) {
  batch.validate();
  const SoftmaxTargets t = softmax_targets(batch.real_scores.size(), batch.fake_scores.size());
  return cross_entropy(batch.concatenated(), t.t_d);
}

LossWithGrad g_loss_softmax(const Batch& batch) {
  batch.validate();
  const SoftmaxTargets t = softmax_targets(batch.real_scores.size(), batch.fake_scores.size());
  return cross_entropy(batch.concatenated(), t.t_g);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double d_loss_gan_baseline(std::span<const double> logits_real,
                           std::span<const double> logits_fake) {
  if (logits_real.empty() || logits_fake.empty()) {
    throw ContractViolation("baseline D loss needs non-empty real and fake logits");
  }
  double r = 0.0, f = 0.0;
  for (double v : logits_real) r += softplus(-v);
  for (double v : logits_fake) f += softplus(v);
  return r / static_cast<double>(logits_real.size()) + f / static_cast<double>(logits_fake.size());
}

double g_loss_gan_nonsaturating(std::span<const double> logits_fake) {
  if (logits_fake.empty()) throw ContractViolation("baseline G loss needs non-empty logits");
  double f = 0.0;
  for (double v : logits_fake) f += softplus(-v);
  return f / static_cast<double>(logits_fake.size());
}

namespace {

void require_nonempty(Var real_scores, Var fake_scores) {
  if (real_scores.value().size() == 0 || fake_scores.value().size() == 0) {
    throw ContractViolation("softmax loss needs non-empty B+ and B-");
  }
}

// Rank-2 n×1 scores and rank-1 vectors both concatenate along rows.
Var all_scores(Var real_scores, Var fake_scores) {
  return concat_rows(real_scores, fake_scores);
}

}  // namespace

Var log_partition(Var real_scores, Var fake_scores) {
  require_nonempty(real_scores, fake_scores);
  return log_sum_exp(neg(all_scores(real_scores, fake_scores)));
}

Var d_loss_softmax(Var real_scores, Var fake_scores) {
  require_nonempty(real_scores, fake_scores);
  return add(mean(real_scores), log_partition(real_scores, fake_scores));
}

Var g_loss_softmax(Var real_scores, Var fake_scores) {
  require_nonempty(real_scores, fake_scores);
  Var all = all_scores(real_scores, fake_scores);
  return add(mean(all), log_sum_exp(neg(all)));
}

Var d_loss_gan_baseline(Var logits_real, Var logits_fake) {
  return add(mean(softplus(neg(logits_real))), mean(softplus(logits_fake)));
}

Var g_loss_gan_nonsaturating(Var logits_fake) { return mean(softplus(neg(logits_fake))); }

}  // namespace smgan
