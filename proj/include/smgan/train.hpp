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

// Alternating GAN training on 2D mixtures, experiment presets and the
// softmax-vs-logistic ablation driver.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smgan/nn.hpp"
#include "smgan/synth.hpp"

namespace smgan::train {

enum class LossVariant { kSoftmax, kBaseline };
// kPositive translates the target off the origin into the positive
// quadrant.
enum class DataScaling { kCentered, kPositive };

std::string_view to_string(LossVariant v);
std::string_view to_string(DataScaling s);

struct TrainConfig {
  LossVariant loss_variant = LossVariant::kSoftmax;
  std::size_t d_steps = 1;
  std::size_t g_steps = 1;
  std::size_t batch_real = 64;
  std::size_t batch_fake = 64;
  std::size_t total_cycles = 20000;
  std::uint64_t seed = 0;
  HiddenActivation hidden_activation = HiddenActivation::kLeakyRelu;
  DataScaling data_scaling = DataScaling::kCentered;
  double lr_d = 2e-4;
  double lr_g = 2e-4;
  std::size_t latent_dim = 2;
  std::string mixture = "ring8";

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline constexpr std::size_t kMetricsEvery = 100;
inline constexpr std::size_t kMetricSamples = 2048;
inline constexpr std::size_t kHistogramGrid = 48;
inline const std::vector<std::size_t> kHiddenSizes{64, 64};

// Mixture named by the config, after data scaling.
synth::GaussianMixture2D resolve_mixture(const TrainConfig& config);
std::vector<std::string> mixture_names();

MlpSpec discriminator_spec(const TrainConfig& config);
MlpSpec generator_spec(const TrainConfig& config);

struct TrainLogRecord {
  std::size_t cycle = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double ln_zb = 0.0;
  std::size_t coverage = 0;
  double hq_fraction = 0.0;
  double hist_js = 0.0;
  double ms = 0.0;

  bool losses_finite() const;
};

enum class Verdict { kConverged, kCollapsed, kDiverged };
std::string_view to_string(Verdict v);

// diverged: a non-finite loss anywhere; collapsed: final coverage below
// ⌈modes/2⌉; converged otherwise.
Verdict verdict_for(const std::vector<TrainLogRecord>& log, std::size_t modes);

struct StepStats {
  double loss = 0.0;
  double ln_zb = 0.0;
};

// Owns both networks and their optimizers. Each phase updates exactly one
// network; the other is bound into the graph as constants.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  StepStats discriminator_step();
  StepStats generator_step();

  // Coverage/quality/JS on the fixed evaluation latent batch.
  TrainLogRecord evaluate(std::size_t cycle, const StepStats& d, const StepStats& g) const;
  Tensor generate(const Tensor& latent) const;

  const TrainConfig& config() const { return config_; }
  const MlpSpec& d_spec() const { return d_spec_; }
  const MlpSpec& g_spec() const { return g_spec_; }
  const MlpParams& discriminator() const { return d_params_; }
  const MlpParams& generator() const { return g_params_; }
  const synth::GaussianMixture2D& mixture() const { return mixture_; }
  const synth::SampleSet& reference_samples() const { return reference_; }
  const Tensor& eval_latent() const { return eval_latent_; }

 private:
  TrainConfig config_;
  synth::GaussianMixture2D mixture_;
  MlpSpec d_spec_;
  MlpSpec g_spec_;
  MlpParams d_params_;
  MlpParams g_params_;
  AdamState d_adam_;
  AdamState g_adam_;
  synth::MixtureSampler data_;
  LatentSampler latent_;
  Tensor eval_latent_;
  synth::SampleSet reference_;
  synth::Bounds hist_bounds_;
};

struct RunArtifacts {
  TrainConfig config;
  MlpSpec d_spec;
  MlpSpec g_spec;
  MlpParams discriminator;
  MlpParams generator;
  std::vector<TrainLogRecord> log;
  synth::SampleSet final_samples;
  Verdict verdict = Verdict::kConverged;
};

struct TrainOptions {
  // Fill TrainLogRecord::ms with wall-clock time. Off by default so logs
  // are bit-reproducible.
  bool record_timing = false;
};

RunArtifacts train(const TrainConfig& config, const TrainOptions& options = {});

// Named experiment configurations.
std::vector<std::string> preset_names();
// Throws ConfigError listing the known presets.
TrainConfig preset_config(std::string_view name);

struct AblationRun {
  LossVariant variant;
  std::uint64_t seed;
  std::size_t coverage;
  double hq_fraction;
  double hist_js;
  double final_d_loss;
  double final_g_loss;
  Verdict verdict;
};

struct AblationReport {
  std::string preset;
  std::size_t modes = 0;
  std::size_t total_cycles = 0;
  // Keyed by (variant, seed) so merge order does not matter.
  std::map<std::pair<int, std::uint64_t>, AblationRun> runs;

  double mean_coverage(LossVariant v) const;
  std::size_t count(LossVariant v) const;
};

struct AblationOptions {
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::optional<std::size_t> total_cycles;  // preset value when unset
  std::size_t jobs = 1;
};

AblationReport run_ablation(std::string_view preset, const AblationOptions& options = {});

}  // namespace smgan::train
