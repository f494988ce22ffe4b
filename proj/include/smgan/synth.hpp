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

// 2D Gaussian-mixture targets and sample-quality metrics: mode coverage,
// high-quality fraction and a binned Jensen-Shannon divergence.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "smgan/random.hpp"
#include "smgan/tensor.hpp"

namespace smgan::synth {

using Point = std::array<double, 2>;

struct GaussianMixture2D {
  std::vector<Point> centers;
  double std = 1.0;
  std::vector<double> weights;  // uniform when constructed by ring()

  std::size_t num_modes() const { return centers.size(); }
  void validate() const;
  GaussianMixture2D translated(double dx, double dy) const;
};

// `modes` centers equally spaced on a circle (first center on +x axis).
GaussianMixture2D ring(std::size_t modes = 8, double radius = 2.0, double std = 0.02);

struct SampleSet {
  std::vector<Point> points;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  Tensor to_tensor() const;  // n × 2
  static SampleSet from_tensor(const Tensor& t, std::uint64_t seed = 0);
};

SampleSet sample_mixture(const GaussianMixture2D& mix, std::size_t n, std::uint64_t seed);

// Stateful version of sample_mixture: consecutive calls continue one
// stream, so sample(a) then sample(b) equals one draw of a + b.
class MixtureSampler {
 public:
  MixtureSampler(GaussianMixture2D mix, std::uint64_t seed);
  SampleSet sample(std::size_t n);
  const GaussianMixture2D& mixture() const { return mix_; }

 private:
  GaussianMixture2D mix_;
  std::uint64_t seed_;
  Rng rng_;
  std::discrete_distribution<std::size_t> pick_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

struct ModeReport {
  std::vector<std::size_t> counts;  // high-quality samples per mode
  std::size_t covered = 0;
  double hq_fraction = 0.0;
};

inline constexpr double kDefaultRadiusMult = 3.0;
// n / (10 · modes), at least 1.
std::size_t default_min_count(std::size_t n, std::size_t modes);

// A sample is high quality when it lies within radius_mult·std of its
// nearest center; a mode is covered when it has at least min_count of them.
ModeReport mode_report(const SampleSet& samples, const GaussianMixture2D& mix,
                       double radius_mult = kDefaultRadiusMult, std::size_t min_count = 1);

struct Bounds {
  double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
};

// Bounds of the mixture's centers padded by `pad`.
Bounds mixture_bounds(const GaussianMixture2D& mix, double pad);

inline constexpr double kHistogramSmoothing = 1e-9;

// ½ KL(p‖m) + ½ KL(q‖m) between grid×grid histograms, points outside the
// bounds clipped into the edge bins, every bin probability offset by 1e-9
// and renormalized.
double histogram_js(const SampleSet& a, const SampleSet& b, std::size_t grid,
                    const Bounds& bounds);

// Two columns, header "x,y", 17 significant digits.
void write_csv(std::ostream& os, const SampleSet& s);
SampleSet read_csv(std::istream& is);

std::string format_double(double v);

}  // namespace smgan::synth
