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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "smgan/error.hpp"
#include "smgan/random.hpp"
#include "smgan/theory.hpp"

namespace smgan::theory {
namespace {

DiscreteDist random_dist(Rng& rng, std::size_t k, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> m(k);
  for (double& v : m) v = u(rng);
  return DiscreteDist::from_masses(m);
}

double l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(DiscreteDistTest, Validation) {
  EXPECT_THROW(DiscreteDist({0.5, 0.6}), ContractViolation);
  EXPECT_THROW(DiscreteDist({-0.1, 1.1}), ContractViolation);
  EXPECT_THROW(DiscreteDist::from_masses({0.0, 0.0}), ContractViolation);
  const DiscreteDist m = DiscreteDist::mixture(DiscreteDist({1.0, 0.0}), DiscreteDist::uniform(2));
  EXPECT_DOUBLE_EQ(m[0], 0.75);
}

TEST(MleTest, UniformEnergiesGiveLnK) {
  EnergyModel model{{2.5, 2.5, 2.5, 2.5, 2.5}};
  EXPECT_NEAR(mle_loss_exact(model, ObservedSet{{0, 3, 3}}), std::log(5.0), 1e-14);
}

TEST(MleTest, HandInstance) {
  EnergyModel model{{0.0, std::log(3.0)}};
  EXPECT_NEAR(mle_loss_exact(model, ObservedSet{{0}}), 0.28768207245178092744, 1e-15);
}

TEST(MleTest, HandGradient) {
  EnergyModel model{{0.0, 0.0}};
  const auto g = mle_grad_exact(model, DiscreteDist({1.0, 0.0}));
  EXPECT_NEAR(g[0], 0.5, 1e-16);
  EXPECT_NEAR(g[1], -0.5, 1e-16);
}

TEST(MleTest, ZeroGradientWhenModelMatchesData) {
  const DiscreteDist p({0.1, 0.2, 0.3, 0.4});
  EnergyModel model;
  for (double v : p.probs) model.energies.push_back(-std::log(v) + 0.7);
  for (double g : mle_grad_exact(model, p)) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(MleTest, GradientMatchesFiniteDifferences) {
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteDist data = random_dist(rng, 6);
    EnergyModel model{std::vector<double>(6)};
    for (double& e : model.energies) e = u(rng);
    const auto g = mle_grad_exact(model, data);
    const double h = 1e-3;
    for (std::size_t i = 0; i < 6; ++i) {
      auto at = [&](double delta) {
        EnergyModel m = model;
        m.energies[i] += delta;
        return mle_loss_exact(m, data);
      };
      const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      EXPECT_LT(std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-8}), 1e-8);
    }
  }
}

TEST(MleTest, DescentRecoversEmpiricalDistribution) {
  const ObservedSet observed{{0, 0, 1, 2, 2, 2, 3, 4, 4, 4}};
  const DiscreteDist target = observed.empirical(5);
  EnergyModel model{std::vector<double>(5, 0.0)};
  for (int it = 0; it < 20000; ++it) {
    const auto g = mle_grad_exact(model, target);
    for (std::size_t i = 0; i < 5; ++i) model.energies[i] -= 1.0 * g[i];
  }
  const auto p = model.density();
  double tv = 0.0;
  for (std::size_t i = 0; i < 5; ++i) tv += 0.5 * std::abs(p[i] - target[i]);
  EXPECT_LT(tv, 1e-6);
}

TEST(ImportanceTest, WeightsSumToOneAtAnyScale) {
  Rng rng = make_rng(4);
  const DiscreteDist q = random_dist(rng, 5);
  for (double scale : {-400.0, 0.0, 400.0}) {
    EnergyModel model{{scale, scale + 1.0, scale - 2.0, scale, scale + 0.5}};
    const ISBatch b = importance_batch(model, q, 64, 9);
    EXPECT_NEAR(std::accumulate(b.weights.begin(), b.weights.end(), 0.0), 1.0, 1e-14);
  }
}

TEST(ImportanceTest, EstimateInvariantToEnergyScaling) {
  Rng rng = make_rng(5);
  const DiscreteDist q = random_dist(rng, 6), data = random_dist(rng, 6);
  EnergyModel model{{0.1, -0.4, 0.9, 1.3, -1.0, 0.2}};
  EnergyModel shifted = model;
  // e^{-ξ} scaled by e^{-3.2}
  for (double& e : shifted.energies) e += 3.2;
  const auto a = is_grad_estimate(model, data, q, 200, 17);
  const auto b = is_grad_estimate(shifted, data, q, 200, 17);
  EXPECT_LT(max_abs_diff(a, b), 1e-14);
}

TEST(ImportanceTest, ProposalMatchingModelGivesEqualWeights) {
  EnergyModel model{{0.2, 1.0, -0.5, 0.3}};
  const DiscreteDist q(model.density());
  const ISBatch b = importance_batch(model, q, 50, 3);
  for (double w : b.weights) EXPECT_NEAR(w, 1.0 / 50.0, 1e-14);
}

TEST(ImportanceTest, ZeroProposalMassIsAContractViolation) {
  EnergyModel model{{0.0, 0.0}};
  const std::vector<std::size_t> states{0};
  EXPECT_THROW(importance_batch(model, DiscreteDist({1.0, 0.0}), states), ContractViolation);
}

TEST(ImportanceTest, ErrorShrinksWithBatchSize) {
  Rng rng = make_rng(6);
  const DiscreteDist q = random_dist(rng, 8), data = random_dist(rng, 8);
  EnergyModel model{std::vector<double>(8)};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& e : model.energies) e = u(rng);
  const auto exact = mle_grad_exact(model, data);
  auto median_error = [&](std::size_t n) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      errs.push_back(l2(is_grad_estimate(model, data, q, n, seed), exact));
    }
    std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
    return errs[10];
  };
  EXPECT_LT(median_error(100000), median_error(1000) / 5.0);
}

TEST(ImportanceTest, TinyBatchStillPointsTheRightWay) {
  Rng rng = make_rng(7);
  const DiscreteDist q = random_dist(rng, 8), data = random_dist(rng, 8);
  EnergyModel model{{1.0, -1.0, 0.5, 0.0, 2.0, -0.5, 0.3, 1.5}};
  const auto exact = mle_grad_exact(model, data);
  double mean_cos = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto est = is_grad_estimate(model, data, q, 5, seed);
    ASSERT_TRUE(std::all_of(est.begin(), est.end(), [](double v) { return std::isfinite(v); }));
    const double dot = std::inner_product(est.begin(), est.end(), exact.begin(), 0.0);
    mean_cos += dot / (l2(est, std::vector<double>(8)) * l2(exact, std::vector<double>(8))) / 100;
  }
  EXPECT_GT(mean_cos, 0.0);
}

TEST(ReparamTest, FormsAgreeOnRandomBatches) {
  Rng rng = make_rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const DiscreteDist q = random_dist(rng, 7, 0.01);
    std::vector<double> mu(7);
    for (double& v : mu) v = u(rng);
    EXPECT_LT(reparam_grad_check(mu, q, trial, 50), 1e-12);
  }
}

TEST(ReparamTest, ZeroScoresGiveUniformBatchWeights) {
  const std::vector<double> mu(4, 0.0);
  const std::vector<std::size_t> states{0, 1, 1, 3};
  const ReparamForms f = reparam_forms(mu, DiscreteDist({0.1, 0.2, 0.3, 0.4}), states);
  const std::vector<double> want{0.25, 0.5, 0.0, 0.25};
  EXPECT_LT(max_abs_diff(f.softmax, want), 1e-15);
  EXPECT_LT(max_abs_diff(f.importance, want), 1e-15);
}

TEST(ReparamTest, HandInstance) {
  const std::vector<double> mu{0.3, -0.7, 1.1, 0.0};
  const std::vector<std::size_t> states{0, 2, 2};
  const ReparamForms f = reparam_forms(mu, DiscreteDist({0.1, 0.2, 0.3, 0.4}), states);
  const std::vector<double> want{0.52668781728886639, 0.0, 0.47331218271113361, 0.0};
  EXPECT_LT(max_abs_diff(f.softmax, want), 1e-15);
  EXPECT_LT(max_abs_diff(f.importance, want), 1e-15);
}

TEST(CorrespondenceTest, BatchGradientMatchesMleGradient) {
  // Table discriminator μ, model e^{-ξ} = e^{-μ} q with q = (p_D + p_G)/2.
  Rng rng = make_rng(9);
  const DiscreteDist p_d = random_dist(rng, 8), p_g = random_dist(rng, 8);
  const DiscreteDist q = DiscreteDist::mixture(p_d, p_g);
  std::vector<double> mu(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : mu) v = u(rng);
  EnergyModel model{std::vector<double>(8)};
  for (std::size_t i = 0; i < 8; ++i) model.energies[i] = mu[i] - std::log(q[i]);
  const auto exact = mle_grad_exact(model, p_d);
  const std::size_t seeds = 50;
  std::vector<double> mean(8, 0.0), sq(8, 0.0);
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto g = softmax_d_grad_table(mu, p_d, p_g, 2048, 2048, s);
    for (std::size_t i = 0; i < 8; ++i) {
      mean[i] += g[i] / seeds;
      sq[i] += g[i] * g[i] / seeds;
    }
  }
  for (std::size_t i = 0; i < 8; ++i) {
    const double se = std::sqrt(std::max(sq[i] - mean[i] * mean[i], 1e-300) / (seeds - 1));
    EXPECT_LT(std::abs(mean[i] - exact[i]), 3.0 * se) << "state " << i;
  }
}

TEST(OptimalDiscriminatorTest, EqualDistributionsGiveConstantScores) {
  const DiscreteDist p({0.1, 0.6, 0.3});
  const FitResult fit = optimal_discriminator_fit(p, p);
  EXPECT_LT(*std::max_element(fit.mu.begin(), fit.mu.end()) -
                *std::min_element(fit.mu.begin(), fit.mu.end()),
            1e-9);
}

TEST(OptimalDiscriminatorTest, FrozenRatios) {
  const DiscreteDist p_d({0.4, 0.3, 0.2, 0.1});
  const FitResult fit = optimal_discriminator_fit(p_d, DiscreteDist::uniform(4));
  const std::vector<double> want{0.32542850434374266, 0.28844799248649918, 0.23503169758159192,
                                 0.15109180558816624};
  EXPECT_LT(max_abs_diff(normalized_mass(fit.mu), want), 1e-9);
  // Raw ratios p_D/q, up to the fitted constant.
  const double c = std::exp(-fit.mu[0]) / 1.2307692307692308;
  EXPECT_NEAR(std::exp(-fit.mu[3]) / c, 0.5714285714285714, 1e-8);
  EXPECT_LT(first_order_residual(fit.mu, p_d, DiscreteDist::uniform(4)), 1e-8);
}

TEST(OptimalDiscriminatorTest, ReproducibleAcrossInitializations) {
  Rng rng = make_rng(10);
  const DiscreteDist p_d = random_dist(rng, 8), p_g = random_dist(rng, 8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> reference;
  for (int init = 0; init < 5; ++init) {
    FitOptions opts;
    opts.initial_mu.resize(8);
    for (double& v : opts.initial_mu) v = u(rng);
    const auto w = normalized_mass(optimal_discriminator_fit(p_d, p_g, opts).mu);
    if (reference.empty()) {
      reference = w;
    } else {
      EXPECT_LT(max_abs_diff(w, reference), 1e-7);
    }
  }
}

TEST(OptimalDiscriminatorTest, RandomPairsMatchDensityRatio) {
  Rng rng = make_rng(11);
  for (std::size_t k : {2u, 4u, 8u, 16u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const DiscreteDist p_d = random_dist(rng, k), p_g = random_dist(rng, k);
      const DiscreteDist m = DiscreteDist::mixture(p_d, p_g);
      std::vector<double> ratio(k);
      for (std::size_t i = 0; i < k; ++i) ratio[i] = p_d[i] / m[i];
      const double total = std::accumulate(ratio.begin(), ratio.end(), 0.0);
      for (double& r : ratio) r /= total;
      const FitResult fit = optimal_discriminator_fit(p_d, p_g);
      EXPECT_LT(max_abs_diff(normalized_mass(fit.mu), ratio), 1e-6);
      EXPECT_LT(first_order_residual(fit.mu, p_d, p_g), 1e-8);
    }
  }
}

TEST(OptimalDiscriminatorTest, NonConvergenceReportsResidual) {
  FitOptions opts;
  opts.max_iterations = 3;
  try {
    optimal_discriminator_fit(DiscreteDist({0.9, 0.1}), DiscreteDist({0.1, 0.9}), opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-10);
  }
}

TEST(KlTest, Values) {
  const DiscreteDist p({0.4, 0.6});
  EXPECT_DOUBLE_EQ(kl(p, p), 0.0);
  EXPECT_NEAR(kl(DiscreteDist({1.0, 0.0}), DiscreteDist::uniform(2)), std::log(2.0), 1e-15);
  EXPECT_NEAR(kl(p, DiscreteDist::uniform(2)), 0.020135513550688873421, 1e-15);
  EXPECT_TRUE(std::isinf(kl(DiscreteDist::uniform(2), DiscreteDist({1.0, 0.0}))));
}

TEST(KlTest, NonNegativeWithEqualityOnlyAtEquality) {
  Rng rng = make_rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscreteDist p = random_dist(rng, 6, 0.0), q = random_dist(rng, 6, 0.01);
    EXPECT_GT(kl(p, q), 0.0);
    EXPECT_NEAR(kl(q, q), 0.0, 1e-15);
  }
}

TEST(GeneratorObjectiveTest, HandInstance) {
  const DiscreteDist p_d = DiscreteDist::uniform(2), p_g({1.0, 0.0});
  const DiscreteDist m = DiscreteDist::mixture(p_d, p_g);
  EXPECT_NEAR(kl(m, p_d), 0.13081203594113695913, 1e-15);
  EXPECT_NEAR(kl(p_d, m), 0.14384103622589046372, 1e-15);
  const GeneratorDecomposition d = generator_objective_decomposition(p_d, p_g);
  ASSERT_TRUE(d.finite);
  EXPECT_NEAR(d.js_sum, 0.27465307216702742285, 1e-14);
  EXPECT_NEAR(d.lhs_kl, 0.13081203594113695913, 1e-14);
}

TEST(GeneratorObjectiveTest, MatchingGeneratorIsTheMinimum) {
  Rng rng = make_rng(13);
  const DiscreteDist p_d = random_dist(rng, 6);
  const GeneratorDecomposition at_min = generator_objective_decomposition(p_d, p_d);
  EXPECT_NEAR(at_min.lhs_kl, 0.0, 1e-15);
  EXPECT_NEAR(at_min.js_sum, 0.0, 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = generator_objective_decomposition(p_d, random_dist(rng, 6));
    EXPECT_GT(d.population_l_g, at_min.population_l_g - 1e-12);
  }
}

TEST(GeneratorObjectiveTest, DiffersFromSymmetricKlByAConstant) {
  Rng rng = make_rng(14);
  for (std::size_t k : {2u, 4u, 8u, 16u}) {
    for (int trial = 0; trial < 25; ++trial) {
      const DiscreteDist p_d = random_dist(rng, k), p_g = random_dist(rng, k);
      const auto d = generator_objective_decomposition(p_d, p_g);
      ASSERT_TRUE(d.finite);
      EXPECT_NEAR(d.population_l_g - d.js_sum, decomposition_offset(p_d), 1e-8);
      EXPECT_NEAR(d.lhs_from_scores, d.lhs_kl, 1e-8);
    }
  }
}

TEST(GeneratorObjectiveTest, SupportViolationIsSignalledNotThrown) {
  const DiscreteDist p_d({0.5, 0.5, 0.0}), p_g({0.2, 0.3, 0.5});
  GeneratorDecomposition d;
  ASSERT_NO_THROW(d = generator_objective_decomposition(p_d, p_g));
  EXPECT_FALSE(d.finite);
  EXPECT_TRUE(std::isinf(d.js_sum));
}

TEST(GeneratorObjectiveTest, SymmetricKlIsStationaryAtTheData) {
  const DiscreteDist p_d({0.15, 0.35, 0.2, 0.3});
  auto js = [&](const std::vector<double>& pg) {
    const DiscreteDist m = DiscreteDist::mixture(p_d, DiscreteDist(pg));
    return kl(m, p_d) + kl(p_d, m);
  };
  const double h = 1e-5;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      std::vector<double> up = p_d.probs, down = p_d.probs;
      up[i] += h, up[j] -= h;
      down[i] -= h, down[j] += h;
      EXPECT_NEAR((js(up) - js(down)) / (2 * h), 0.0, 1e-9);
    }
  }
}

TEST(GeneratorObjectiveTest, BatchGradientConvergesToPopulation) {
  Rng rng = make_rng(15);
  const DiscreteDist p_d = random_dist(rng, 8), p_g = random_dist(rng, 8);
  const auto exact = generator_rhs_gradient_exact(p_d, p_g);
  auto median_error = [&](std::size_t n) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      errs.push_back(l2(generator_rhs_gradient_estimate(p_d, p_g, n, seed), exact));
    }
    std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
    return errs[10];
  };
  EXPECT_LT(median_error(100000), median_error(1000) / 5.0);
}

}  // namespace
}  // namespace smgan::theory
