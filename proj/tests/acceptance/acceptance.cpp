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

// Acceptance gate: one PASS/FAIL line per primary criterion.
//
//   smgan_acceptance [--skip-training] [--known-failure ID]... [--jobs N]
//
// Exit status is 0 when every criterion passes or fails only as listed via
// --known-failure, 1 otherwise. A known failure that starts passing is
// reported and also exits 1, so the list cannot go stale silently.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "smgan/checks.hpp"
#include "smgan/gradcheck.hpp"
#include "smgan/io.hpp"
#include "smgan/kernels.hpp"
#include "smgan/losses.hpp"
#include "smgan/random.hpp"
#include "smgan/train.hpp"

namespace {

using namespace smgan;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kGradRelTol = 1e-6;
constexpr std::size_t kGradInstances = 20;
constexpr double kGradBudgetS = 10.0;
constexpr double kShiftTol = 1e-10;
constexpr double kLossGradTol = 1e-6;
constexpr std::size_t kLossBatches = 1000;
constexpr double kLossBudgetS = 5.0;
constexpr double kFitRatioTol = 1e-6;
constexpr double kFitResidualTol = 1e-8;
constexpr double kFitBudgetS = 30.0;
constexpr double kSpreadTol = 1e-8;
constexpr double kSpreadBudgetS = 30.0;
constexpr double kReparamTol = 1e-12;
constexpr double kEstimatorRatio = 0.2;
constexpr double kEstimatorBudgetS = 60.0;
constexpr double kTrainingBudgetS = 15.0 * 60.0;

// Pinned training protocol.
constexpr std::size_t kTrainCycles = 20000;
constexpr std::size_t kCoverageNeeded = 7;
constexpr std::size_t kSeedsNeeded = 4;
const std::vector<std::uint64_t> kDefaultSeeds{0, 1, 2, 3, 4};
const std::vector<std::uint64_t> kReluPositiveSeeds{0, 1, 2, 3, 4};
const std::vector<std::uint64_t> kRatioSeeds{0, 1, 2};

struct Outcome {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const io::CheckResult* find(const std::vector<io::CheckResult>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  const auto checks = checks::gradient_suite(kGradInstances);
  const double s = since(t0);
  double worst = 0.0;
  std::string worst_name, failed;
  for (const auto& c : checks) {
    if (!c.pass) failed += " " + c.name;
    if (c.tolerance == kGradRelTol && c.value >= worst) {
      worst = c.value;
      worst_name = c.name;
    }
  }
  const bool pass = failed.empty() && s < kGradBudgetS;
  return {"gradient_suite", pass,
          fmt("%zu checks x %zu instances, worst rel err %.3g (%s) < %g, %.2fs < %gs%s",
              checks.size(), kGradInstances, worst, worst_name.c_str(), kGradRelTol, s,
              kGradBudgetS, failed.empty() ? "" : (", failed:" + failed).c_str()),
          s};
}

Outcome loss_identities() {
  const auto t0 = Clock::now();
  Rng rng = make_rng(20261014, 1);
  std::uniform_real_distribution<double> score(-20.0, 20.0), shift(-100.0, 100.0);
  std::uniform_int_distribution<std::size_t> size(1, 32);
  double worst_shift = 0.0, worst_grad = 0.0, min_grad_norm = INFINITY, min_lg_gap = INFINITY;
  double worst_equal = 0.0;
  for (std::size_t i = 0; i < kLossBatches; ++i) {
    Batch b;
    b.real_scores.resize(size(rng));
    b.fake_scores.resize(size(rng));
    for (double& v : b.real_scores) v = score(rng);
    for (double& v : b.fake_scores) v = score(rng);
    const LossWithGrad ld = d_loss_softmax(b), lg = g_loss_softmax(b);

    Batch shifted = b;
    const double c = shift(rng);
    for (double& v : shifted.real_scores) v += c;
    for (double& v : shifted.fake_scores) v += c;
    worst_shift = std::max({worst_shift, std::abs(d_loss_softmax(shifted).value - ld.value),
                            std::abs(g_loss_softmax(shifted).value - lg.value)});

    min_lg_gap = std::min(min_lg_gap, lg.value - std::log(static_cast<double>(b.size())));
    Batch equal{std::vector<double>(b.real_scores.size(), c),
                std::vector<double>(b.fake_scores.size(), c)};
    worst_equal = std::max(worst_equal, std::abs(g_loss_softmax(equal).value -
                                                 std::log(static_cast<double>(b.size()))));

    double sq = 0.0;
    for (double g : ld.grad) sq += g * g;
    min_grad_norm = std::min(min_grad_norm, std::sqrt(sq));

    for (int which = 0; which < 2; ++which) {
      Graph g;
      Var r = g.parameter(Tensor::vector(b.real_scores));
      Var f = g.parameter(Tensor::vector(b.fake_scores));
      g.backward(which == 0 ? d_loss_softmax(r, f) : g_loss_softmax(r, f));
      const auto& analytic = which == 0 ? ld.grad : lg.grad;
      const std::size_t nr = b.real_scores.size();
      for (std::size_t j = 0; j < nr; ++j) {
        worst_grad = std::max(worst_grad, relative_error(analytic[j], g.grad(r)[j]));
      }
      for (std::size_t j = 0; j < b.fake_scores.size(); ++j) {
        worst_grad = std::max(worst_grad, relative_error(analytic[nr + j], g.grad(f)[j]));
      }
    }
  }
  const double s = since(t0);
  const bool pass = worst_shift < kShiftTol && min_lg_gap > 0.0 && worst_equal < kShiftTol &&
                    worst_grad < kLossGradTol && min_grad_norm > 0.0 && s < kLossBudgetS;
  return {"loss_identities", pass,
          fmt("shift err %.3g < %g; min L_G - ln|B| %.3g > 0, equal-score gap %.3g; "
              "t-s vs autodiff %.3g < %g; min |grad L_D| %.3g > 0 over %zu batches; %.2fs < %gs",
              worst_shift, kShiftTol, min_lg_gap, worst_equal, worst_grad, kLossGradTol,
              min_grad_norm, kLossBatches, s, kLossBudgetS),
          s};
}

struct TheoryOutcomes {
  Outcome fit, spread, estimator;
};

TheoryOutcomes theory_criteria() {
  const auto t0 = Clock::now();
  const auto checks = checks::theory_suite();
  const double s = since(t0);
  auto value = [&](const char* name) {
    const io::CheckResult* c = find(checks, name);
    return c ? c->value : NAN;
  };
  const double ratio = value("theory/optimal_discriminator_ratio");
  const double residual = value("theory/optimal_discriminator_residual");
  const double spread = value("theory/generator_objective_spread");
  const double reparam = value("theory/reparam_identity");
  const double shrink = value("theory/is_error_ratio_1e5_vs_1e3");
  // The suite runs as one unit; its wall time bounds every sub-budget.
  TheoryOutcomes out;
  out.fit = {"optimal_discriminator_oracle",
             ratio < kFitRatioTol && residual < kFitResidualTol && s < kFitBudgetS,
             fmt("50 pairs, K in {2,4,8,16}: ratio err %.3g < %g, residual %.3g < %g; %.2fs",
                 ratio, kFitRatioTol, residual, kFitResidualTol, s),
             s};
  out.spread = {"generator_objective_oracle", spread < kSpreadTol && s < kSpreadBudgetS,
                fmt("100 p_G at fixed p_D: spread of (L_G - symmetric KL) %.3g < %g; %.2fs",
                    spread, kSpreadTol, s),
                s};
  out.estimator = {"estimator_convergence",
                   reparam < kReparamTol && shrink < kEstimatorRatio && s < kEstimatorBudgetS,
                   fmt("reparam gap %.3g < %g; median err ratio n=1e5/n=1e3 %.3f < %g; %.2fs",
                       reparam, kReparamTol, shrink, kEstimatorRatio, s),
                   s};
  return out;
}

template <typename T>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::max<std::size_t>(1, std::min(jobs, n)); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) out[i] = f(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

std::string log_csv(const train::RunArtifacts& a) {
  std::ostringstream os;
  io::write_log_csv(os, a.log);
  return os.str();
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct TrainingOutcomes {
  std::vector<Outcome> items;
};

TrainingOutcomes training_criteria(std::size_t jobs) {
  using train::LossVariant;
  struct Job {
    std::string preset;
    LossVariant variant;
    std::uint64_t seed;
  };
  std::vector<Job> plan;
  for (auto s : kDefaultSeeds) plan.push_back({"default", LossVariant::kSoftmax, s});
  for (auto v : {LossVariant::kSoftmax, LossVariant::kBaseline}) {
    for (auto s : kReluPositiveSeeds) plan.push_back({"relu-positive", v, s});
    for (auto s : kRatioSeeds) plan.push_back({"ratio-5-1", v, s});
    for (auto s : kRatioSeeds) plan.push_back({"ratio-1-5", v, s});
  }
  // Repeat of the first default run for the determinism criterion.
  plan.push_back(plan.front());

  const auto t0 = Clock::now();
  const auto runs = parallel_map<train::RunArtifacts>(plan.size(), jobs, [&](std::size_t i) {
    train::TrainConfig c = train::preset_config(plan[i].preset);
    c.loss_variant = plan[i].variant;
    c.seed = plan[i].seed;
    c.total_cycles = kTrainCycles;
    return train::train(c);
  });
  const double s = since(t0);

  auto coverages = [&](const std::string& preset, LossVariant v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < plan.size(); ++i) {
      if (plan[i].preset == preset && plan[i].variant == v) out.push_back(runs[i].log.back().coverage);
    }
    return out;
  };
  auto mean = [](const std::vector<std::size_t>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };

  TrainingOutcomes out;
  const auto a = coverages("default", LossVariant::kSoftmax);
  const auto hits = static_cast<std::size_t>(
      std::count_if(a.begin(), a.end(), [](std::size_t c) { return c >= kCoverageNeeded; }));
  out.items.push_back({"training_default_coverage", hits >= kSeedsNeeded,
                       fmt("softmax, default preset, %zu cycles: coverage [%s]/8, %zu seeds >= %zu/8 "
                           "(need >= %zu of %zu)",
                           kTrainCycles, join(a).c_str(), hits, kCoverageNeeded, kSeedsNeeded,
                           a.size()),
                       s});

  const auto bs = coverages("relu-positive", LossVariant::kSoftmax);
  const auto bb = coverages("relu-positive", LossVariant::kBaseline);
  out.items.push_back({"training_relu_positive", mean(bs) >= mean(bb),
                       fmt("mean coverage softmax %.2f [%s] >= baseline %.2f [%s]", mean(bs),
                           join(bs).c_str(), mean(bb), join(bb).c_str()),
                       s});

  const auto s51 = coverages("ratio-5-1", LossVariant::kSoftmax);
  const auto s15 = coverages("ratio-1-5", LossVariant::kSoftmax);
  const auto b51 = coverages("ratio-5-1", LossVariant::kBaseline);
  const auto b15 = coverages("ratio-1-5", LossVariant::kBaseline);
  const double soft_drop = mean(s51) - mean(s15), base_drop = mean(b51) - mean(b15);
  out.items.push_back({"training_ratio_1_5", soft_drop <= base_drop,
                       fmt("coverage drop 5:1 -> 1:5, softmax %.2f ([%s] -> [%s]) <= baseline %.2f "
                           "([%s] -> [%s])",
                           soft_drop, join(s51).c_str(), join(s15).c_str(), base_drop,
                           join(b51).c_str(), join(b15).c_str()),
                       s});

  out.items.push_back({"training_runtime", s < kTrainingBudgetS,
                       fmt("%zu runs of %zu cycles on %zu worker(s): %.0fs < %.0fs", plan.size(),
                           kTrainCycles, std::max<std::size_t>(1, jobs), s, kTrainingBudgetS),
                       s});

  const bool same = log_csv(runs.front()) == log_csv(runs.back());
  out.items.push_back({"determinism", same,
                       fmt("default seed %llu repeated: log CSVs (%zu rows) %s",
                           static_cast<unsigned long long>(plan.front().seed),
                           runs.front().log.size(), same ? "bit-identical" : "differ"),
                       s});
  return out;
}

Outcome short_determinism() {
  const auto t0 = Clock::now();
  train::TrainConfig c;
  c.total_cycles = 2000;
  c.seed = 11;
  const bool same = log_csv(train::train(c)) == log_csv(train::train(c));
  return {"determinism", same,
          fmt("2000-cycle run repeated: log CSVs %s", same ? "bit-identical" : "differ"),
          since(t0)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  bool skip_training = false;
  std::vector<std::string> known;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_flag("--skip-training", skip_training, "Skip the 20k-cycle training criteria");
  app.add_option("--known-failure", known, "Criterion id expected to fail");
  app.add_option("--jobs", jobs, "Parallel training runs");
  CLI11_PARSE(app, argc, argv);
  const std::set<std::string> known_set(known.begin(), known.end());

  std::printf("kernels: %s\n", std::string(kernels::isa_name(kernels::active().isa)).c_str());
  std::fflush(stdout);
  std::vector<Outcome> all;
  auto report = [&](const Outcome& o) {
    const bool expected_fail = known_set.count(o.id) > 0;
    const char* tag = o.pass ? (expected_fail ? "PASS (listed as known failure)" : "PASS")
                             : (expected_fail ? "FAIL (known)" : "FAIL");
    std::printf("%-6s %-30s %s\n", tag, o.id.c_str(), o.detail.c_str());
    std::fflush(stdout);
    all.push_back(o);
  };

  report(gradient_suite());
  report(loss_identities());
  const TheoryOutcomes th = theory_criteria();
  report(th.fit);
  report(th.spread);
  report(th.estimator);
  if (skip_training) {
    report(short_determinism());
  } else {
    for (const Outcome& o : training_criteria(jobs).items) report(o);
  }

  std::size_t unexpected = 0, known_failed = 0;
  for (const Outcome& o : all) {
    const bool listed = known_set.count(o.id) > 0;
    if (o.pass == listed) ++unexpected;
    if (!o.pass && listed) ++known_failed;
  }
  const std::size_t passed = static_cast<std::size_t>(
      std::count_if(all.begin(), all.end(), [](const Outcome& o) { return o.pass; }));
  std::printf("%zu/%zu criteria pass, %zu known failure(s), %zu unexpected result(s)\n", passed,
              all.size(), known_failed, unexpected);
  return unexpected == 0 ? 0 : 1;
}
