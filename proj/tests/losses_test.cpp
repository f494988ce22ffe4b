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
#include "smgan/gradcheck.hpp"
#include "smgan/losses.hpp"
#include "smgan/random.hpp"

namespace smgan {
namespace {

Batch random_batch(Rng& rng, std::size_t nr, std::size_t nf, double spread = 5.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Batch b;
  for (std::size_t i = 0; i < nr; ++i) b.real_scores.push_back(u(rng));
  for (std::size_t i = 0; i < nf; ++i) b.fake_scores.push_back(u(rng));
  return b;
}

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

TEST(TargetsTest, SumToOne) {
  const SoftmaxTargets t = softmax_targets(3, 5);
  EXPECT_DOUBLE_EQ(std::accumulate(t.t_d.begin(), t.t_d.end(), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(std::accumulate(t.t_g.begin(), t.t_g.end(), 0.0), 1.0);
  for (std::size_t i = 3; i < 8; ++i) EXPECT_EQ(t.t_d[i], 0.0);
  for (double v : t.t_g) EXPECT_EQ(v, t.t_g[0]);
}

TEST(BatchSoftmaxTest, EqualScoresAreUniform) {
  for (double c : {-30.0, 0.0, 7.5}) {
    const auto s = batch_softmax(std::vector<double>{c, c, c, c});
    for (double v : s) EXPECT_NEAR(v, 0.25, 1e-16);
  }
}

TEST(BatchSoftmaxTest, HandRatio) {
  const auto s = batch_softmax(std::vector<double>{0.0, std::log(3.0)});
  EXPECT_NEAR(s[0], 0.75, 1e-15);
  EXPECT_NEAR(s[1], 0.25, 1e-15);
}

TEST(BatchSoftmaxTest, ExtremeScoresDoNotOverflow) {
  const auto s = batch_softmax(std::vector<double>{800.0, -800.0, 800.0, -800.0});
  double total = 0.0;
  for (double v : s) {
    ASSERT_TRUE(std::isfinite(v));
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_NEAR(s[1], 0.5, 1e-15);
}

TEST(BatchTest, EmptySideIsAContractViolation) {
  EXPECT_THROW(d_loss_softmax(Batch{{}, {1.0}}), ContractViolation);
  EXPECT_THROW(g_loss_softmax(Batch{{1.0}, {}}), ContractViolation);
  EXPECT_THROW(d_loss_softmax(Batch{{NAN}, {1.0}}), ContractViolation);
}

TEST(DLossTest, EqualScoresGiveLn4) {
  for (double c : {-3.0, 0.0, 11.0}) {
    EXPECT_NEAR(d_loss_softmax(Batch{{c, c}, {c, c}}).value, std::log(4.0), 1e-14);
  }
}

TEST(DLossTest, FrozenValue) {
  // ln(2 + 2e^{-5})
  EXPECT_NEAR(d_loss_softmax(Batch{{0, 0}, {5, 5}}).value, 0.69986252904906337803, 1e-15);
}

TEST(DLossTest, GradientAtEqualScores) {
  const LossWithGrad l = d_loss_softmax(Batch{{1, 1}, {1, 1}});
  const std::vector<double> want{0.25, 0.25, -0.25, -0.25};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(l.grad[i], want[i], 1e-16);
}

TEST(DLossTest, StrictLowerBoundAndLimit) {
  Rng rng = make_rng(5);
  for (int i = 0; i < 200; ++i) {
    const Batch b = random_batch(rng, 4, 6);
    EXPECT_GT(d_loss_softmax(b).value, std::log(4.0));
  }
  const double at40 = d_loss_softmax(Batch{{0, 0}, {40, 40}}).value;
  EXPECT_LE(std::abs(at40 - std::log(2.0)), 1e-15);
}

TEST(GLossTest, EqualScoresGiveLnBAndZeroGradient) {
  const LossWithGrad l = g_loss_softmax(Batch{{2, 2}, {2, 2}});
  EXPECT_NEAR(l.value, std::log(4.0), 1e-14);
  for (double g : l.grad) EXPECT_NEAR(g, 0.0, 1e-16);
}

TEST(GLossTest, FrozenValue) {
  // 0.5 + ln(2 + 2e^{-1})
  EXPECT_NEAR(g_loss_softmax(Batch{{0, 0}, {1, 1}}).value, 1.5064088680781681435, 1e-15);
}

TEST(GLossTest, LowerBoundWithEqualityOnlyAtEqualScores) {
  Rng rng = make_rng(6);
  for (int i = 0; i < 200; ++i) {
    const Batch b = random_batch(rng, 3, 5);
    const LossWithGrad l = g_loss_softmax(b);
    EXPECT_GT(l.value, std::log(8.0));
    EXPECT_GT(norm(l.grad), 0.0);
  }
}

TEST(LossIdentityTest, ShiftInvariance) {
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    Batch b = random_batch(rng, 5, 5);
    const double c = shift(rng);
    Batch shifted = b;
    for (double& v : shifted.real_scores) v += c;
    for (double& v : shifted.fake_scores) v += c;
    EXPECT_NEAR(d_loss_softmax(shifted).value, d_loss_softmax(b).value, 1e-10);
    EXPECT_NEAR(g_loss_softmax(shifted).value, g_loss_softmax(b).value, 1e-10);
  }
}

TEST(LossIdentityTest, PermutationInvariance) {
  Rng rng = make_rng(8);
  for (int i = 0; i < 50; ++i) {
    Batch b = random_batch(rng, 6, 7);
    Batch p = b;
    std::shuffle(p.real_scores.begin(), p.real_scores.end(), rng);
    std::shuffle(p.fake_scores.begin(), p.fake_scores.end(), rng);
    EXPECT_NEAR(d_loss_softmax(p).value, d_loss_softmax(b).value, 1e-13);
    EXPECT_NEAR(g_loss_softmax(p).value, g_loss_softmax(b).value, 1e-13);
  }
}

TEST(LossIdentityTest, DiscriminatorGradientNeverVanishes) {
  Rng rng = make_rng(9);
  std::uniform_int_distribution<std::size_t> size(1, 16);
  for (int i = 0; i < 1000; ++i) {
    const Batch b = random_batch(rng, size(rng), size(rng), 20.0);
    EXPECT_GT(norm(d_loss_softmax(b).grad), 0.0);
  }
}

TEST(LossIdentityTest, AnalyticGradientMatchesAutodiff) {
  Rng rng = make_rng(10);
  for (int i = 0; i < 20; ++i) {
    const Batch b = random_batch(rng, 4, 3);
    for (int which = 0; which < 2; ++which) {
      const LossWithGrad analytic = which == 0 ? d_loss_softmax(b) : g_loss_softmax(b);
      Graph g;
      Var r = g.parameter(Tensor::vector(b.real_scores));
      Var f = g.parameter(Tensor::vector(b.fake_scores));
      Var loss = which == 0 ? d_loss_softmax(r, f) : g_loss_softmax(r, f);
      EXPECT_NEAR(loss.value().item(), analytic.value, 1e-13);
      g.backward(loss);
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_LT(relative_error(analytic.grad[j], g.grad(r)[j]), 1e-6);
      }
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_LT(relative_error(analytic.grad[4 + j], g.grad(f)[j]), 1e-6);
      }
    }
  }
}

TEST(LossIdentityTest, GraphLossesPassFiniteDifferences) {
  Rng rng = make_rng(11);
  for (int i = 0; i < 20; ++i) {
    const Batch b = random_batch(rng, 3, 4, 3.0);
    const std::vector<Tensor> in{Tensor::vector(b.real_scores), Tensor::vector(b.fake_scores)};
    EXPECT_LT(finite_diff_check(
                  [](Graph&, std::span<const Var> v) { return d_loss_softmax(v[0], v[1]); }, in)
                  .max_rel_error,
              1e-6);
    EXPECT_LT(finite_diff_check(
                  [](Graph&, std::span<const Var> v) { return g_loss_softmax(v[0], v[1]); }, in)
                  .max_rel_error,
              1e-6);
  }
}

TEST(LogPartitionTest, MatchesDirectSum) {
  const std::vector<double> mu{0.5, -1.0, 2.0};
  double z = 0.0;
  for (double m : mu) z += std::exp(-m);
  EXPECT_NEAR(log_partition(mu), std::log(z), 1e-15);
}

TEST(BaselineTest, Values) {
  EXPECT_NEAR(d_loss_gan_baseline(std::vector<double>{0, 0}, std::vector<double>{0, 0}),
              2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(g_loss_gan_nonsaturating(std::vector<double>{0.0}), std::log(2.0), 1e-15);
  EXPECT_LT(g_loss_gan_nonsaturating(std::vector<double>{40.0}), 1e-16);
  EXPECT_NEAR(g_loss_gan_nonsaturating(std::vector<double>{-40.0}), 40.0, 1e-12);
  EXPECT_NEAR(g_loss_gan_nonsaturating(std::vector<double>{-400.0}), 400.0, 1e-12);
}

TEST(BaselineTest, GraphMatchesScalar) {
  const std::vector<double> r{0.3, -1.2}, f{2.0, -0.7, 0.1};
  Graph g;
  Var d = d_loss_gan_baseline(g.input(Tensor::vector(r)), g.input(Tensor::vector(f)));
  Var gl = g_loss_gan_nonsaturating(g.input(Tensor::vector(f)));
  EXPECT_NEAR(d.value().item(), d_loss_gan_baseline(r, f), 1e-15);
  EXPECT_NEAR(gl.value().item(), g_loss_gan_nonsaturating(f), 1e-15);
}

}  // namespace
}  // namespace smgan
