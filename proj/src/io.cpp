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
#include "smgan/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "smgan/error.hpp"

namespace smgan::io {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& config_fields() {
  static const std::vector<std::string> fields{
      "loss_variant", "d_steps",         "g_steps",      "batch_real", "batch_fake",
      "total_cycles", "seed",            "hidden_activation", "data_scaling",
      "lr_d",         "lr_g",            "latent_dim",   "mixture"};
  return fields;
}

std::size_t get_count(const json& j, const std::string& field) {
  const json& v = j.at(field);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError("field '" + field + "' must be an integer", field);
  }
  if (v.is_number_integer() && v.get<long long>() < 0) {
    throw ConfigError("field '" + field + "' must be non-negative", field);
  }
  return v.get<std::size_t>();
}

double get_real(const json& j, const std::string& field) {
  const json& v = j.at(field);
  if (!v.is_number()) throw ConfigError("field '" + field + "' must be a number", field);
  return v.get<double>();
}

std::string get_string(const json& j, const std::string& field) {
  const json& v = j.at(field);
  if (!v.is_string()) throw ConfigError("field '" + field + "' must be a string", field);
  return v.get<std::string>();
}

}  // namespace

train::TrainConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "line L, column C" in the message.
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  const auto& fields = config_fields();
  for (const auto& [key, value] : j.items()) {
    if (key != "preset" && std::find(fields.begin(), fields.end(), key) == fields.end()) {
      throw ConfigError("unknown config field '" + key + "'", key);
    }
  }

  train::TrainConfig c;
  const bool has_preset = j.contains("preset");
  if (has_preset) {
    c = train::preset_config(get_string(j, "preset"));
  } else {
    for (const std::string& f : fields) {
      if (!j.contains(f)) throw ConfigError("missing required field '" + f + "'", f);
    }
  }

  if (j.contains("loss_variant")) {
    const std::string v = get_string(j, "loss_variant");
    if (v == "softmax") {
      c.loss_variant = train::LossVariant::kSoftmax;
    } else if (v == "baseline") {
      c.loss_variant = train::LossVariant::kBaseline;
    } else {
      throw ConfigError("loss_variant must be softmax | baseline, got '" + v + "'", "loss_variant");
    }
  }
  if (j.contains("d_steps")) c.d_steps = get_count(j, "d_steps");
  if (j.contains("g_steps")) c.g_steps = get_count(j, "g_steps");
  if (j.contains("batch_real")) c.batch_real = get_count(j, "batch_real");
  if (j.contains("batch_fake")) c.batch_fake = get_count(j, "batch_fake");
  if (j.contains("total_cycles")) c.total_cycles = get_count(j, "total_cycles");
  if (j.contains("seed")) c.seed = get_count(j, "seed");
  if (j.contains("hidden_activation")) {
    const std::string v = get_string(j, "hidden_activation");
    try {
      c.hidden_activation = parse_hidden_activation(v);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what(), "hidden_activation");
    }
  }
  if (j.contains("data_scaling")) {
    const std::string v = get_string(j, "data_scaling");
    if (v == "centered") {
      c.data_scaling = train::DataScaling::kCentered;
    } else if (v == "positive") {
      c.data_scaling = train::DataScaling::kPositive;
    } else {
      throw ConfigError("data_scaling must be centered | positive, got '" + v + "'", "data_scaling");
    }
  }
  if (j.contains("lr_d")) c.lr_d = get_real(j, "lr_d");
  if (j.contains("lr_g")) c.lr_g = get_real(j, "lr_g");
  if (j.contains("latent_dim")) c.latent_dim = get_count(j, "latent_dim");
  if (j.contains("mixture")) c.mixture = get_string(j, "mixture");
  c.validate();
  return c;
}

train::TrainConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json config_to_json(const train::TrainConfig& c) {
  return json{{"loss_variant", std::string(to_string(c.loss_variant))},
              {"d_steps", c.d_steps},
              {"g_steps", c.g_steps},
              {"batch_real", c.batch_real},
              {"batch_fake", c.batch_fake},
              {"total_cycles", c.total_cycles},
              {"seed", c.seed},
              {"hidden_activation", std::string(to_string(c.hidden_activation))},
              {"data_scaling", std::string(to_string(c.data_scaling))},
              {"lr_d", c.lr_d},
              {"lr_g", c.lr_g},
              {"latent_dim", c.latent_dim},
              {"mixture", c.mixture}};
}

json mlp_to_json(const MlpSpec& spec, const MlpParams& params) {
  json tensors = json::object();
  const std::vector<std::string> names = params.tensor_names();
  const std::vector<const Tensor*> ts = params.tensors();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tensors[names[i]] = json{{"shape", ts[i]->shape()}, {"values", ts[i]->values()}};
  }
  return json{{"spec",
               {{"layer_sizes", spec.layer_sizes},
                {"hidden_activation", std::string(to_string(spec.hidden_activation))},
                {"output_activation", std::string(to_string(spec.output_activation))},
                {"leaky_slope", spec.leaky_slope}}},
              {"params", tensors}};
}

std::pair<MlpSpec, MlpParams> mlp_from_json(const json& j) {
  MlpSpec spec;
  const json& s = j.at("spec");
  spec.layer_sizes = s.at("layer_sizes").get<std::vector<std::size_t>>();
  spec.hidden_activation = parse_hidden_activation(s.at("hidden_activation").get<std::string>());
  spec.output_activation = parse_output_activation(s.at("output_activation").get<std::string>());
  spec.leaky_slope = s.at("leaky_slope").get<double>();
  MlpParams params = zero_params(spec);
  const std::vector<std::string> names = params.tensor_names();
  std::vector<Tensor*> ts = params.tensors();
  const json& p = j.at("params");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const json& t = p.at(names[i]);
    Tensor loaded(t.at("shape").get<Shape>(), t.at("values").get<std::vector<double>>());
    if (loaded.shape() != ts[i]->shape()) {
      throw DimensionError("checkpoint tensor " + names[i] + " has shape " +
                           shape_string(loaded.shape()) + ", expected " +
                           shape_string(ts[i]->shape()));
    }
    *ts[i] = std::move(loaded);
  }
  return {spec, params};
}

void save_checkpoint(const fs::path& path, const Checkpoint& c) {
  const json j{{"format", "smgan-checkpoint-1"},
               {"config", config_to_json(c.config)},
               {"discriminator", mlp_to_json(c.d_spec, c.discriminator)},
               {"generator", mlp_to_json(c.g_spec, c.generator)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "checkpoint.json" : path;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open checkpoint " + file.string());
  const json j = json::parse(in);
  Checkpoint c;
  c.config = parse_config(j.at("config").dump());
  std::tie(c.d_spec, c.discriminator) = mlp_from_json(j.at("discriminator"));
  std::tie(c.g_spec, c.generator) = mlp_from_json(j.at("generator"));
  return c;
}

void write_log_csv(std::ostream& os, const std::vector<train::TrainLogRecord>& log) {
  using synth::format_double;
  os << kLogHeader << '\n';
  for (const train::TrainLogRecord& r : log) {
    os << r.cycle << ',' << format_double(r.d_loss) << ',' << format_double(r.g_loss) << ','
       << format_double(r.ln_zb) << ',' << r.coverage << ',' << format_double(r.hq_fraction)
       << ',' << format_double(r.hist_js) << ',' << format_double(r.ms) << '\n';
  }
}

namespace {

// JSON has no infinities; encode them as strings so reports stay valid.
json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

json report_to_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  bool all = true;
  for (const CheckResult& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", number_or_string(c.value)},
                   {"tolerance", number_or_string(c.tolerance)},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  return json{{"checks", arr}, {"all_pass", all}};
}

void write_scatter_svg(std::ostream& os, const synth::SampleSet& real,
                       const synth::SampleSet& generated, const synth::Bounds& b,
                       const ScatterOptions& opt) {
  const double margin = 56.0;
  const double pw = opt.width - 2 * margin;
  const double ph = opt.height - 2 * margin;
  const auto sx = [&](double x) { return margin + (x - b.x_min) / (b.x_max - b.x_min) * pw; };
  const auto sy = [&](double y) { return margin + (b.y_max - y) / (b.y_max - b.y_min) * ph; };
  const auto inside = [&](const synth::Point& p) {
    return std::isfinite(p[0]) && std::isfinite(p[1]) && p[0] >= b.x_min && p[0] <= b.x_max &&
           p[1] >= b.y_min && p[1] <= b.y_max;
  };
  char buf[320];
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">" << opt.title << "</text>\n";
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n",
                margin, margin, pw, ph);
  os << buf;
  // Ticks at the bounds and midpoints.
  for (int i = 0; i <= 4; ++i) {
    const double fx = b.x_min + (b.x_max - b.x_min) * i / 4.0;
    const double fy = b.y_min + (b.y_max - b.y_min) * i / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">%.2f</text>\n",
                  sx(fx), margin + ph + 16, fx);
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">%.2f</text>\n",
                  margin - 6, sy(fy) + 4, fy);
    os << buf;
  }
  os << "<text x=\"" << opt.width / 2 << "\" y=\"" << opt.height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">x</text>\n";
  os << "<text x=\"16\" y=\"" << opt.height / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 16 " << opt.height / 2 << ")\">y</text>\n";

  os << "<g id=\"real\" fill=\"#888888\" fill-opacity=\"0.5\">\n";
  for (const synth::Point& p : real.points) {
    if (!inside(p)) continue;
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\"/>\n", sx(p[0]), sy(p[1]));
    os << buf;
  }
  os << "</g>\n<g id=\"generated\" stroke=\"#1f4fd8\" stroke-width=\"1\">\n";
  for (const synth::Point& p : generated.points) {
    if (!inside(p)) continue;
    const double x = sx(p[0]), y = sy(p[1]);
    std::snprintf(buf, sizeof(buf),
                  "<path d=\"M%.2f %.2fL%.2f %.2fM%.2f %.2fL%.2f %.2f\"/>\n", x - 2, y - 2, x + 2,
                  y + 2, x - 2, y + 2, x + 2, y - 2);
    os << buf;
  }
  os << "</g>\n";
  const double lx = margin + 8, ly = margin + 14;
  std::snprintf(buf, sizeof(buf),
                "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#888888\"/>"
                "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\">real</text>\n",
                lx, ly, lx + 8, ly + 4);
  os << buf;
  std::snprintf(buf, sizeof(buf),
                "<path d=\"M%.2f %.2fL%.2f %.2fM%.2f %.2fL%.2f %.2f\" stroke=\"#1f4fd8\"/>"
                "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\">generated</text>\n",
                lx - 3, ly + 13, lx + 3, ly + 19, lx - 3, ly + 19, lx + 3, ly + 13, lx + 8, ly + 20);
  os << buf;
  os << "</svg>\n";
}

json summary_to_json(const train::RunArtifacts& a) {
  json j{{"verdict", std::string(to_string(a.verdict))},
         {"config", config_to_json(a.config)},
         {"log_rows", a.log.size()}};
  if (!a.log.empty()) {
    const train::TrainLogRecord& r = a.log.back();
    j["final"] = {{"cycle", r.cycle},
                  {"d_loss", number_or_string(r.d_loss)},
                  {"g_loss", number_or_string(r.g_loss)},
                  {"ln_zb", number_or_string(r.ln_zb)},
                  {"coverage", r.coverage},
                  {"hq_fraction", r.hq_fraction},
                  {"hist_js", r.hist_js}};
  }
  return j;
}

json ablation_to_json(const train::AblationReport& r) {
  json runs = json::array();
  for (const auto& [key, run] : r.runs) {
    runs.push_back({{"variant", std::string(to_string(run.variant))},
                    {"seed", run.seed},
                    {"coverage", run.coverage},
                    {"hq_fraction", run.hq_fraction},
                    {"hist_js", run.hist_js},
                    {"final_d_loss", number_or_string(run.final_d_loss)},
                    {"final_g_loss", number_or_string(run.final_g_loss)},
                    {"verdict", std::string(to_string(run.verdict))}});
  }
  return json{{"preset", r.preset},
              {"modes", r.modes},
              {"total_cycles", r.total_cycles},
              {"mean_coverage",
               {{"softmax", r.mean_coverage(train::LossVariant::kSoftmax)},
                {"baseline", r.mean_coverage(train::LossVariant::kBaseline)}}},
              {"runs", runs}};
}

void write_run_artifacts(const fs::path& dir, const train::RunArtifacts& a) {
  fs::create_directories(dir);
  save_checkpoint(dir / "checkpoint.json",
                  Checkpoint{a.config, a.d_spec, a.g_spec, a.discriminator, a.generator});
  {
    std::ofstream out(dir / "config.json");
    out << config_to_json(a.config).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "log.csv");
    write_log_csv(out, a.log);
  }
  {
    std::ofstream out(dir / "samples.csv");
    synth::write_csv(out, a.final_samples);
  }
  const synth::GaussianMixture2D mix = train::resolve_mixture(a.config);
  {
    const synth::SampleSet real = synth::sample_mixture(mix, a.final_samples.size(), a.config.seed);
    std::ofstream out(dir / "scatter.svg");
    write_scatter_svg(out, real, a.final_samples, synth::mixture_bounds(mix, 1.0),
                      ScatterOptions{std::string(to_string(a.config.loss_variant)) + " GAN, seed " +
                                     std::to_string(a.config.seed)});
  }
  {
    std::ofstream out(dir / "summary.json");
    out << summary_to_json(a).dump(2) << '\n';
  }
}

}  // namespace smgan::io
