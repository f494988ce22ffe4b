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
// Command-line front end: train, ablation, theory-check, gradcheck, sample.
// Exit codes: 0 success, 1 failed checks, 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "smgan/checks.hpp"
#include "smgan/error.hpp"
#include "smgan/io.hpp"
#include "smgan/kernels.hpp"
#include "smgan/train.hpp"

namespace fs = std::filesystem;
using namespace smgan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedChecks = 1;
constexpr int kExitUsage = 2;

void write_json(const std::string& path, const io::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

int report_checks(const std::vector<io::CheckResult>& checks, const std::string& out) {
  bool all = true;
  for (const io::CheckResult& c : checks) {
    std::fprintf(stderr, "%-4s %-44s value=%-12.4g tol=%.3g\n", c.pass ? "ok" : "FAIL",
                 c.name.c_str(), c.value, c.tolerance);
    all = all && c.pass;
  }
  write_json(out, io::report_to_json(checks));
  return all ? kExitOk : kExitFailedChecks;
}

int run_train(const std::string& config_path, const std::string& out_dir, bool timing) {
  const train::TrainConfig config = io::load_config(config_path);
  std::fprintf(stderr, "training %s variant, seed %llu, %zu cycles (%s kernels)\n",
               std::string(train::to_string(config.loss_variant)).c_str(),
               static_cast<unsigned long long>(config.seed), config.total_cycles,
               std::string(kernels::isa_name(kernels::active().isa)).c_str());
  const train::RunArtifacts a = train::train(config, train::TrainOptions{timing});
  io::write_run_artifacts(out_dir, a);
  const train::TrainLogRecord* last = a.log.empty() ? nullptr : &a.log.back();
  std::fprintf(stderr, "verdict %s", std::string(train::to_string(a.verdict)).c_str());
  if (last) std::fprintf(stderr, ", coverage %zu/8, hq %.3f", last->coverage, last->hq_fraction);
  std::fprintf(stderr, "\nartifacts in %s\n", out_dir.c_str());
  return kExitOk;
}

int run_ablation(const std::string& preset, std::size_t seeds, std::size_t cycles,
                 std::size_t jobs, const std::string& out) {
  train::AblationOptions opt;
  opt.seeds.clear();
  for (std::size_t s = 0; s < seeds; ++s) opt.seeds.push_back(s);
  if (cycles > 0) opt.total_cycles = cycles;
  opt.jobs = jobs;
  const train::AblationReport r = train::run_ablation(preset, opt);
  std::fprintf(stderr, "%-9s %5s %9s %8s %8s %s\n", "variant", "seed", "coverage", "hq", "js",
               "verdict");
  for (const auto& [key, run] : r.runs) {
    std::fprintf(stderr, "%-9s %5llu %6zu/%zu %8.3f %8.4f %s\n",
                 std::string(train::to_string(run.variant)).c_str(),
                 static_cast<unsigned long long>(run.seed), run.coverage, r.modes, run.hq_fraction,
                 run.hist_js, std::string(train::to_string(run.verdict)).c_str());
  }
  std::fprintf(stderr, "mean coverage: softmax %.2f, baseline %.2f\n",
               r.mean_coverage(train::LossVariant::kSoftmax),
               r.mean_coverage(train::LossVariant::kBaseline));
  write_json(out, io::ablation_to_json(r));
  return kExitOk;
}

int run_sample(const std::string& checkpoint, std::size_t n, std::uint64_t seed,
               const std::string& out_dir_arg) {
  const io::Checkpoint c = io::load_checkpoint(checkpoint);
  const fs::path in(checkpoint);
  const fs::path out_dir = !out_dir_arg.empty() ? fs::path(out_dir_arg)
                           : fs::is_directory(in) ? in
                                                  : in.parent_path();
  fs::create_directories(out_dir);
  LatentSampler latent(c.g_spec.input_dim(), seed);
  const synth::SampleSet gen = synth::SampleSet::from_tensor(forward(c.g_spec, c.generator, latent.sample(n)), seed);
  {
    std::ofstream csv(out_dir / "generated.csv");
    synth::write_csv(csv, gen);
  }
  const synth::GaussianMixture2D mix = train::resolve_mixture(c.config);
  const synth::SampleSet real = synth::sample_mixture(mix, n, seed);
  {
    std::ofstream svg(out_dir / "generated.svg");
    io::write_scatter_svg(svg, real, gen, synth::mixture_bounds(mix, 1.0),
                          io::ScatterOptions{"generated vs real (" + std::to_string(n) + " samples)"});
  }
  const synth::ModeReport rep = synth::mode_report(
      gen, mix, synth::kDefaultRadiusMult, synth::default_min_count(n, mix.num_modes()));
  std::fprintf(stderr, "wrote %zu samples to %s (coverage %zu/%zu, hq %.3f)\n", n,
               (out_dir / "generated.csv").string().c_str(), rep.covered, mix.num_modes(),
               rep.hq_fraction);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-softmax GAN losses, exact theory checks and 2D training"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out/run";
  bool timing = false;
  auto* train_cmd = app.add_subcommand("train", "Train from a JSON config and write run artifacts");
  train_cmd->add_option("config", config_path, "Config JSON file")->required();
  train_cmd->add_option("-o,--out", out_dir, "Output directory");
  train_cmd->add_flag("--timing", timing, "Record wall-clock ms in the log (breaks bit-reproducibility)");

  std::string preset, ablation_out;
  std::size_t seeds = 3, cycles = 0, jobs = 1;
  auto* abl_cmd = app.add_subcommand("ablation", "Run softmax and baseline variants of a preset");
  abl_cmd->add_option("preset", preset, "Preset name")->required();
  abl_cmd->add_option("--seeds", seeds, "Number of seeds (0..n-1)")->check(CLI::PositiveNumber);
  abl_cmd->add_option("--cycles", cycles, "Override total_cycles");
  abl_cmd->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  abl_cmd->add_option("-o,--out", ablation_out, "Report JSON path (stdout if omitted)");

  std::string theory_out;
  auto* theory_cmd = app.add_subcommand("theory-check", "Run the importance-sampling theory checks");
  theory_cmd->add_option("-o,--out", theory_out, "Report JSON path (stdout if omitted)");

  std::string grad_out;
  std::size_t instances = 20;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Run finite-difference gradient checks");
  grad_cmd->add_option("-o,--out", grad_out, "Report JSON path (stdout if omitted)");
  grad_cmd->add_option("--instances", instances, "Random instances per operation")->check(CLI::PositiveNumber);

  std::string checkpoint, sample_out;
  std::size_t n = 2048;
  std::uint64_t sample_seed = 0;
  auto* sample_cmd = app.add_subcommand("sample", "Draw generator samples from a checkpoint (CSV + SVG)");
  sample_cmd->add_option("--checkpoint", checkpoint, "Run directory or checkpoint.json")->required();
  sample_cmd->add_option("--n", n, "Number of samples")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample_seed, "Latent seed");
  sample_cmd->add_option("-o,--out", sample_out, "Output directory (checkpoint directory if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(config_path, out_dir, timing);
    if (*abl_cmd) return run_ablation(preset, seeds, cycles, jobs, ablation_out);
    if (*theory_cmd) return report_checks(checks::theory_suite(), theory_out);
    if (*grad_cmd) return report_checks(checks::gradient_suite(instances), grad_out);
    if (*sample_cmd) return run_sample(checkpoint, n, sample_seed, sample_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
