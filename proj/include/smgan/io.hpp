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

// File formats: JSON run configs, JSON parameter checkpoints, CSV logs,
// JSON check reports and standalone SVG scatter plots.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "smgan/nn.hpp"
#include "smgan/synth.hpp"
#include "smgan/train.hpp"

namespace smgan::io {

using nlohmann::json;

// Every TrainConfig field is required unless a "preset" key supplies
// defaults. Unknown keys are rejected. Throws ConfigError with the field
// name, or with line/column for syntax errors.
train::TrainConfig parse_config(std::string_view text);
train::TrainConfig load_config(const std::filesystem::path& path);
json config_to_json(const train::TrainConfig& config);

json mlp_to_json(const MlpSpec& spec, const MlpParams& params);
std::pair<MlpSpec, MlpParams> mlp_from_json(const json& j);

struct Checkpoint {
  train::TrainConfig config;
  MlpSpec d_spec, g_spec;
  MlpParams discriminator, generator;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
// Accepts the checkpoint file or the run directory containing
// checkpoint.json.
Checkpoint load_checkpoint(const std::filesystem::path& path);

inline constexpr std::string_view kLogHeader = "cycle,d_loss,g_loss,ln_zb,coverage,hq_fraction,hist_js,ms";
void write_log_csv(std::ostream& os, const std::vector<train::TrainLogRecord>& log);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

json report_to_json(const std::vector<CheckResult>& checks);

struct ScatterOptions {
  std::string title = "samples";
  double width = 640.0;
  double height = 640.0;
};

// Real points as grey circles, generated points as blue crosses.
void write_scatter_svg(std::ostream& os, const synth::SampleSet& real,
                       const synth::SampleSet& generated, const synth::Bounds& bounds,
                       const ScatterOptions& options = {});

json summary_to_json(const train::RunArtifacts& a);
json ablation_to_json(const train::AblationReport& r);

// Writes checkpoint.json, config.json, log.csv, samples.csv, scatter.svg
// and summary.json under `dir`.
void write_run_artifacts(const std::filesystem::path& dir, const train::RunArtifacts& a);

}  // namespace smgan::io
