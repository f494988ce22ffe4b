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
#include "smgan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "smgan/error.hpp"
#include "smgan/random.hpp"

namespace smgan::synth {

void GaussianMixture2D::validate() const {
  if (centers.empty()) throw ContractViolation("mixture needs at least one center");
  if (!(std > 0.0)) throw ContractViolation("mixture std must be positive");
  if (weights.size() != centers.size()) {
    throw ContractViolation("mixture weights and centers differ in count");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation("mixture weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ContractViolation("mixture weights must sum to 1");
}

GaussianMixture2D GaussianMixture2D::translated(double dx, double dy) const {
  GaussianMixture2D out = *this;
  for (Point& c : out.centers) {
    c[0] += dx;
    c[1] += dy;
  }
  return out;
}

GaussianMixture2D ring(std::size_t modes, double radius, double std) {
  if (modes == 0) throw ContractViolation("ring needs at least one mode");
  GaussianMixture2D mix;
  mix.std = std;
  for (std::size_t i = 0; i < modes; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(modes);
    mix.centers.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  mix.weights.assign(modes, 1.0 / static_cast<double>(modes));
  return mix;
}

Tensor SampleSet::to_tensor() const {
  Tensor t({points.size(), 2});
  for (std::size_t i = 0; i < points.size(); ++i) {
    t.at(i, 0) = points[i][0];
    t.at(i, 1) = points[i][1];
  }
  return t;
}

SampleSet SampleSet::from_tensor(const Tensor& t, std::uint64_t seed) {
  if (t.rank() != 2 || t.cols() != 2) {
    throw DimensionError("sample set needs an n×2 tensor, got " + shape_string(t.shape()));
  }
  SampleSet s;
  s.seed = seed;
  s.points.resize(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) s.points[i] = {t.at(i, 0), t.at(i, 1)};
  return s;
}

MixtureSampler::MixtureSampler(GaussianMixture2D mix, std::uint64_t seed)
    : mix_(std::move(mix)), seed_(seed), rng_(make_rng(seed, 0xd47a)) {
  mix_.validate();
  pick_ = std::discrete_distribution<std::size_t>(mix_.weights.begin(), mix_.weights.end());
}

SampleSet MixtureSampler::sample(std::size_t n) {
  if (n == 0) throw ContractViolation("sample_mixture needs n >= 1");
  SampleSet s;
  s.seed = seed_;
  s.points.resize(n);
  for (Point& p : s.points) {
    const Point& c = mix_.centers[pick_(rng_)];
    const double nx = noise_(rng_);
    const double ny = noise_(rng_);
    p = {c[0] + mix_.std * nx, c[1] + mix_.std * ny};
  }
  return s;
}

SampleSet sample_mixture(const GaussianMixture2D& mix, std::size_t n, std::uint64_t seed) {
  MixtureSampler sampler(mix, seed);
  return sampler.sample(n);
}

std::size_t default_min_count(std::size_t n, std::size_t modes) {
  return std::max<std::size_t>(1, (n + 10 * modes - 1) / (10 * modes));
}

ModeReport mode_report(const SampleSet& samples, const GaussianMixture2D& mix,
                       double radius_mult, std::size_t min_count) {
  if (!(radius_mult > 0.0)) throw ContractViolation("radius_mult must be positive");
  if (min_count == 0) throw ContractViolation("min_count must be >= 1");
  if (mix.centers.empty()) throw ContractViolation("mixture has no centers");
  const double r2 = (radius_mult * mix.std) * (radius_mult * mix.std);
  ModeReport rep;
  rep.counts.assign(mix.num_modes(), 0);
  std::size_t hq = 0;
  for (const Point& p : samples.points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
    double best = INFINITY;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < mix.centers.size(); ++i) {
      const double dx = p[0] - mix.centers[i][0];
      const double dy = p[1] - mix.centers[i][1];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_i = i;
      }
    }
    if (best <= r2) {
      ++rep.counts[best_i];
      ++hq;
    }
  }
  for (std::size_t c : rep.counts) rep.covered += c >= min_count ? 1 : 0;
  rep.hq_fraction = samples.points.empty()
                        ? 0.0
                        : static_cast<double>(hq) / static_cast<double>(samples.points.size());
  return rep;
}

Bounds mixture_bounds(const GaussianMixture2D& mix, double pad) {
  Bounds b{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const Point& c : mix.centers) {
    b.x_min = std::min(b.x_min, c[0]);
    b.x_max = std::max(b.x_max, c[0]);
    b.y_min = std::min(b.y_min, c[1]);
    b.y_max = std::max(b.y_max, c[1]);
  }
  b.x_min -= pad;
  b.x_max += pad;
  b.y_min -= pad;
  b.y_max += pad;
  return b;
}

namespace {

std::vector<double> histogram(const SampleSet& s, std::size_t grid, const Bounds& b) {
  std::vector<double> h(grid * grid, 0.0);
  const double gx = static_cast<double>(grid) / (b.x_max - b.x_min);
  const double gy = static_cast<double>(grid) / (b.y_max - b.y_min);
  std::size_t used = 0;
  for (const Point& p : s.points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
    const auto bin = [grid](double v) {
      const double f = std::floor(v);
      if (f < 0.0) return std::size_t{0};
      if (f >= static_cast<double>(grid)) return grid - 1;
      return static_cast<std::size_t>(f);
    };
    const std::size_t ix = bin((p[0] - b.x_min) * gx);
    const std::size_t iy = bin((p[1] - b.y_min) * gy);
    h[iy * grid + ix] += 1.0;
    ++used;
  }
  double total = 0.0;
  for (double& v : h) {
    v = (used ? v / static_cast<double>(used) : 0.0) + kHistogramSmoothing;
    total += v;
  }
  for (double& v : h) v /= total;
  return h;
}

}  // namespace

double histogram_js(const SampleSet& a, const SampleSet& b, std::size_t grid,
                    const Bounds& bounds) {
  if (grid < 2) throw ContractViolation("histogram grid must be >= 2");
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
    throw ContractViolation("histogram bounds are empty");
  }
  const std::vector<double> p = histogram(a, grid, bounds);
  const std::vector<double> q = histogram(b, grid, bounds);
  // Each bin's term is symmetric in (p, q), so the sum is exactly symmetric.
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    js += 0.5 * (p[i] * std::log(p[i] / m)) + 0.5 * (q[i] * std::log(q[i] / m));
  }
  return std::clamp(js, 0.0, std::numbers::ln2);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const SampleSet& s) {
  os << "x,y\n";
  for (const Point& p : s.points) os << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
}

SampleSet read_csv(std::istream& is) {
  SampleSet s;
  std::string line;
  if (!std::getline(is, line) || line != "x,y") {
    throw ContractViolation("sample CSV must start with header 'x,y'");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ContractViolation("sample CSV line " + std::to_string(lineno) + ": missing comma");
    }
    s.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return s;
}

}  // namespace smgan::synth
