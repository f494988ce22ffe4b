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
#include "smgan/train.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "smgan/error.hpp"
#include "smgan/losses.hpp"

namespace smgan::train {

std::string_view to_string(LossVariant v) {
  return v == LossVariant::kSoftmax ? "softmax" : "baseline";
}

std::string_view to_string(DataScaling s) {
  return s == DataScaling::kCentered ? "centered" : "positive";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kConverged: return "converged";
    case Verdict::kCollapsed: return "collapsed";
    case Verdict::kDiverged: return "diverged";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  const auto positive = [](std::size_t v, const char* field) {
    if (v < 1) throw ConfigError(std::string(field) + " must be >= 1", field);
  };
  positive(d_steps, "d_steps");
  positive(g_steps, "g_steps");
  positive(batch_real, "batch_real");
  positive(batch_fake, "batch_fake");
  positive(total_cycles, "total_cycles");
  positive(latent_dim, "latent_dim");
  if (!(lr_d >= 0.0) || !std::isfinite(lr_d)) throw ConfigError("lr_d must be >= 0", "lr_d");
  if (!(lr_g >= 0.0) || !std::isfinite(lr_g)) throw ConfigError("lr_g must be >= 0", "lr_g");
  const auto names = mixture_names();
  if (std::find(names.begin(), names.end(), mixture) == names.end()) {
    throw ConfigError("unknown mixture '" + mixture + "' (known: ring8)", "mixture");
  }
}

std::vector<std::string> mixture_names() { return {"ring8"}; }

synth::GaussianMixture2D resolve_mixture(const TrainConfig& config) {
  if (config.mixture != "ring8") {
    throw ConfigError("unknown mixture '" + config.mixture + "'", "mixture");
  }
  synth::GaussianMixture2D mix = synth::ring(8, 2.0, 0.02);
  if (config.data_scaling == DataScaling::kPositive) {
    // Radius 2 ring moved to center (3, 3): every coordinate in (0.9, 5.1).
    mix = mix.translated(3.0, 3.0);
  }
  return mix;
}

MlpSpec discriminator_spec(const TrainConfig& config) {
  MlpSpec s;
  s.layer_sizes.push_back(2);
  s.layer_sizes.insert(s.layer_sizes.end(), kHiddenSizes.begin(), kHiddenSizes.end());
  s.layer_sizes.push_back(1);
  s.hidden_activation = config.hidden_activation;
  s.output_activation = OutputActivation::kIdentity;
  return s;
}

MlpSpec generator_spec(const TrainConfig& config) {
  MlpSpec s;
  s.layer_sizes.push_back(config.latent_dim);
  s.layer_sizes.insert(s.layer_sizes.end(), kHiddenSizes.begin(), kHiddenSizes.end());
  s.layer_sizes.push_back(2);
  s.hidden_activation = config.hidden_activation;
  s.output_activation = OutputActivation::kIdentity;
  return s;
}

bool TrainLogRecord::losses_finite() const {
  return std::isfinite(d_loss) && std::isfinite(g_loss) && std::isfinite(ln_zb);
}

Verdict verdict_for(const std::vector<TrainLogRecord>& log, std::size_t modes) {
  for (const TrainLogRecord& r : log) {
    if (!r.losses_finite()) return Verdict::kDiverged;
  }
  if (log.empty()) return Verdict::kConverged;
  const std::size_t half = (modes + 1) / 2;
  return log.back().coverage < half ? Verdict::kCollapsed : Verdict::kConverged;
}

namespace {

// Stream ids below keep the random sources of one run independent.
constexpr std::uint64_t kStreamDataSampler = 1;
constexpr std::uint64_t kStreamLatent = 2;
constexpr std::uint64_t kStreamEvalLatent = 3;
constexpr std::uint64_t kStreamReference = 4;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r = make_rng(seed, stream);
  return r();
}

std::vector<Tensor> gradients_of(const Graph& g, const std::vector<Var>& vars) {
  std::vector<Tensor> out;
  out.reserve(vars.size());
  for (const Var& v : vars) out.push_back(g.grad(v));
  return out;
}

}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_((config.validate(), std::move(config))),
      mixture_(resolve_mixture(config_)),
      d_spec_(discriminator_spec(config_)),
      g_spec_(generator_spec(config_)),
      d_params_(init_params(d_spec_, sub_seed(config_.seed, 10))),
      g_params_(init_params(g_spec_, sub_seed(config_.seed, 11))),
      d_adam_(d_params_, AdamConfig{config_.lr_d}),
      g_adam_(g_params_, AdamConfig{config_.lr_g}),
      data_(mixture_, sub_seed(config_.seed, kStreamDataSampler)),
      latent_(config_.latent_dim, sub_seed(config_.seed, kStreamLatent)) {
  LatentSampler eval(config_.latent_dim, sub_seed(config_.seed, kStreamEvalLatent));
  eval_latent_ = eval.sample(kMetricSamples);
  reference_ = synth::sample_mixture(mixture_, kMetricSamples,
                                     sub_seed(config_.seed, kStreamReference));
  hist_bounds_ = synth::mixture_bounds(mixture_, 1.0);
}

StepStats Trainer::discriminator_step() {
  const std::size_t nr = config_.batch_real;
  const std::size_t nf = config_.batch_fake;
  const Tensor real = data_.sample(nr).to_tensor();
  const Tensor z = latent_.sample(nf);

  Graph g;
  const std::vector<Var> gp = bind_params(g, g_params_, false);
  const std::vector<Var> dp = bind_params(g, d_params_, true);
  Var fake = forward(g_spec_, gp, g.input(z));
  Var scores = forward(d_spec_, dp, concat_rows(g.input(real), fake));
  Var real_s = slice_rows(scores, 0, nr);
  Var fake_s = slice_rows(scores, nr, nr + nf);
  Var loss = config_.loss_variant == LossVariant::kSoftmax ? d_loss_softmax(real_s, fake_s)
                                                           : d_loss_gan_baseline(real_s, fake_s);
  StepStats st;
  st.loss = loss.value().item();
  st.ln_zb = log_partition(scores.value().data());
  if (!std::isfinite(st.loss)) return st;
  g.backward(loss);
  const std::vector<Tensor> grads = gradients_of(g, dp);
  adam_step(d_params_, grads, d_adam_);
  return st;
}

StepStats Trainer::generator_step() {
  const std::size_t nr = config_.batch_real;
  const std::size_t nf = config_.batch_fake;
  const Tensor z = latent_.sample(nf);

  Graph g;
  const std::vector<Var> gp = bind_params(g, g_params_, true);
  const std::vector<Var> dp = bind_params(g, d_params_, false);
  Var fake = forward(g_spec_, gp, g.input(z));
  Var loss;
  StepStats st;
  if (config_.loss_variant == LossVariant::kSoftmax) {
    // Real scores enter Z_B but carry no generator gradient.
    const Tensor real = data_.sample(nr).to_tensor();
    Var scores = forward(d_spec_, dp, concat_rows(g.input(real), fake));
    loss = g_loss_softmax(slice_rows(scores, 0, nr), slice_rows(scores, nr, nr + nf));
    st.ln_zb = log_partition(scores.value().data());
  } else {
    Var fake_s = forward(d_spec_, dp, fake);
    loss = g_loss_gan_nonsaturating(fake_s);
    st.ln_zb = log_partition(fake_s.value().data());
  }
  st.loss = loss.value().item();
  if (!std::isfinite(st.loss)) return st;
  g.backward(loss);
  const std::vector<Tensor> grads = gradients_of(g, gp);
  adam_step(g_params_, grads, g_adam_);
  return st;
}

Tensor Trainer::generate(const Tensor& latent) const {
  return forward(g_spec_, g_params_, latent);
}

TrainLogRecord Trainer::evaluate(std::size_t cycle, const StepStats& d, const StepStats& g) const {
  TrainLogRecord r;
  r.cycle = cycle;
  r.d_loss = d.loss;
  r.g_loss = g.loss;
  r.ln_zb = d.ln_zb;
  const synth::SampleSet gen = synth::SampleSet::from_tensor(generate(eval_latent_));
  const synth::ModeReport rep =
      synth::mode_report(gen, mixture_, synth::kDefaultRadiusMult,
                         synth::default_min_count(gen.size(), mixture_.num_modes()));
  r.coverage = rep.covered;
  r.hq_fraction = rep.hq_fraction;
  r.hist_js = synth::histogram_js(gen, reference_, kHistogramGrid, hist_bounds_);
  return r;
}

RunArtifacts train(const TrainConfig& config, const TrainOptions& options) {
  Trainer t(config);
  RunArtifacts out;
  out.config = t.config();
  out.d_spec = t.d_spec();
  out.g_spec = t.g_spec();

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  StepStats d, g;
  bool diverged = false;
  for (std::size_t cycle = 0; cycle < config.total_cycles && !diverged; ++cycle) {
    for (std::size_t i = 0; i < config.d_steps && !diverged; ++i) {
      d = t.discriminator_step();
      diverged = !std::isfinite(d.loss) || !t.discriminator().all_finite();
    }
    for (std::size_t i = 0; i < config.g_steps && !diverged; ++i) {
      g = t.generator_step();
      diverged = !std::isfinite(g.loss) || !t.generator().all_finite();
    }
    const bool last = cycle + 1 == config.total_cycles;
    if (diverged || last || (cycle + 1) % kMetricsEvery == 0) {
      TrainLogRecord r = t.evaluate(cycle, d, g);
      if (diverged && r.losses_finite()) r.d_loss = std::nan("");
      if (options.record_timing) {
        r.ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      }
      out.log.push_back(r);
    }
  }
  out.discriminator = t.discriminator();
  out.generator = t.generator();
  out.final_samples = synth::SampleSet::from_tensor(t.generate(t.eval_latent()), config.seed);
  out.verdict = verdict_for(out.log, t.mixture().num_modes());
  return out;
}

std::vector<std::string> preset_names() {
  return {"default", "relu-positive", "ratio-5-1", "ratio-1-5", "small-batch"};
}

TrainConfig preset_config(std::string_view name) {
  TrainConfig c;
  if (name == "default") return c;
  if (name == "relu-positive") {
    c.hidden_activation = HiddenActivation::kRelu;
    c.data_scaling = DataScaling::kPositive;
    return c;
  }
  if (name == "ratio-5-1") {
    c.d_steps = 5;
    c.g_steps = 1;
    return c;
  }
  if (name == "ratio-1-5") {
    c.d_steps = 1;
    c.g_steps = 5;
    return c;
  }
  if (name == "small-batch") {
    c.batch_real = 5;
    c.batch_fake = 5;
    return c;
  }
  std::string known;
  for (const std::string& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")", "preset");
}

double AblationReport::mean_coverage(LossVariant v) const {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& [key, run] : runs) {
    if (run.variant == v) {
      s += static_cast<double>(run.coverage);
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

std::size_t AblationReport::count(LossVariant v) const {
  std::size_t n = 0;
  for (const auto& [key, run] : runs) n += run.variant == v ? 1 : 0;
  return n;
}

AblationReport run_ablation(std::string_view preset, const AblationOptions& options) {
  const TrainConfig base = preset_config(preset);
  AblationReport report;
  report.preset = std::string(preset);
  report.modes = resolve_mixture(base).num_modes();
  report.total_cycles = options.total_cycles.value_or(base.total_cycles);

  std::vector<TrainConfig> jobs;
  for (LossVariant v : {LossVariant::kSoftmax, LossVariant::kBaseline}) {
    for (std::uint64_t seed : options.seeds) {
      TrainConfig c = base;
      c.loss_variant = v;
      c.seed = seed;
      c.total_cycles = report.total_cycles;
      jobs.push_back(c);
    }
  }

  std::mutex mu;
  std::size_t next = 0;
  const auto worker = [&]() {
    for (;;) {
      TrainConfig c;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= jobs.size()) return;
        c = jobs[next++];
      }
      const RunArtifacts a = train(c);
      AblationRun run{c.loss_variant, c.seed, 0, 0.0, 0.0, 0.0, 0.0, a.verdict};
      if (!a.log.empty()) {
        const TrainLogRecord& last = a.log.back();
        run.coverage = last.coverage;
        run.hq_fraction = last.hq_fraction;
        run.hist_js = last.hist_js;
        run.final_d_loss = last.d_loss;
        run.final_g_loss = last.g_loss;
      }
      std::lock_guard<std::mutex> lock(mu);
      report.runs[{static_cast<int>(c.loss_variant), c.seed}] = run;
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(options.jobs, 1, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  return report;
}

}  // namespace smgan::train
