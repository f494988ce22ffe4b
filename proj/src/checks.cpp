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
#include "smgan/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "smgan/gradcheck.hpp"
#include "smgan/losses.hpp"
#include "smgan/nn.hpp"
#include "smgan/random.hpp"
#include "smgan/theory.hpp"

namespace smgan::checks {

namespace {

constexpr double kStep = 1e-5;
constexpr double kGradTol = 1e-6;

Tensor random_tensor(Rng& rng, Shape shape, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = u(rng);
  return t;
}

// Reduces a tensor-valued op to a scalar through fixed random weights so
// every output entry contributes a distinct adjoint.
Var weighted_sum(Graph& g, Var y, const Tensor& w) { return sum(mul(y, g.input(w))); }

struct OpCase {
  std::string name;
  std::function<std::vector<Tensor>(Rng&)> make_inputs;
  std::function<Var(Graph&, std::span<const Var>)> build;
  // Output shape given inputs, for the reduction weights.
  std::function<Shape(const std::vector<Tensor>&)> out_shape;
};

std::vector<OpCase> op_cases() {
  std::vector<OpCase> cases;
  const auto unary = [&cases](std::string name, std::function<Var(Var)> op, double lo = -3.0,
                              double hi = 3.0) {
    cases.push_back({std::move(name),
                     [lo, hi](Rng& r) { return std::vector<Tensor>{random_tensor(r, {3, 4}, lo, hi)}; },
                     [op](Graph&, std::span<const Var> v) { return op(v[0]); },
                     [](const std::vector<Tensor>& in) { return in[0].shape(); }});
  };
  cases.push_back({"matmul",
                   [](Rng& r) { return std::vector<Tensor>{random_tensor(r, {3, 4}), random_tensor(r, {4, 2})}; },
                   [](Graph&, std::span<const Var> v) { return matmul(v[0], v[1]); },
                   [](const std::vector<Tensor>&) { return Shape{3, 2}; }});
  cases.push_back({"linear",
                   [](Rng& r) {
                     return std::vector<Tensor>{random_tensor(r, {5, 3}), random_tensor(r, {4, 3}),
                                                random_tensor(r, {4})};
                   },
                   [](Graph&, std::span<const Var> v) { return linear(v[0], v[1], v[2]); },
                   [](const std::vector<Tensor>&) { return Shape{5, 4}; }});
  const auto binary = [&cases](std::string name, std::function<Var(Var, Var)> op) {
    cases.push_back({std::move(name),
                     [](Rng& r) { return std::vector<Tensor>{random_tensor(r, {3, 4}), random_tensor(r, {3, 4})}; },
                     [op](Graph&, std::span<const Var> v) { return op(v[0], v[1]); },
                     [](const std::vector<Tensor>& in) { return in[0].shape(); }});
  };
  binary("add", [](Var a, Var b) { return add(a, b); });
  binary("sub", [](Var a, Var b) { return sub(a, b); });
  binary("mul", [](Var a, Var b) { return mul(a, b); });
  cases.push_back({"add_bias",
                   [](Rng& r) { return std::vector<Tensor>{random_tensor(r, {3, 4}), random_tensor(r, {4})}; },
                   [](Graph&, std::span<const Var> v) { return add_bias(v[0], v[1]); },
                   [](const std::vector<Tensor>&) { return Shape{3, 4}; }});
  unary("relu", [](Var x) { return relu(x); });
  unary("leaky_relu", [](Var x) { return leaky_relu(x, 0.2); });
  unary("tanh", [](Var x) { return tanh(x); });
  unary("exp", [](Var x) { return exp(x); });
  unary("log", [](Var x) { return log(x); }, 0.2, 3.0);
  unary("neg", [](Var x) { return neg(x); });
  unary("scale", [](Var x) { return scale(x, -1.7); });
  unary("softplus", [](Var x) { return softplus(x); });
  cases.push_back({"slice_rows",
                   [](Rng& r) { return std::vector<Tensor>{random_tensor(r, {4, 3})}; },
                   [](Graph&, std::span<const Var> v) { return slice_rows(v[0], 1, 3); },
                   [](const std::vector<Tensor>&) { return Shape{2, 3}; }});
  cases.push_back({"concat_rows",
                   [](Rng& r) { return std::vector<Tensor>{random_tensor(r, {2, 3}), random_tensor(r, {3, 3})}; },
                   [](Graph&, std::span<const Var> v) { return concat_rows(v[0], v[1]); },
                   [](const std::vector<Tensor>&) { return Shape{5, 3}; }});
  return cases;
}

io::CheckResult max_error_check(const std::string& name, const std::vector<double>& errors,
                                double tol) {
  const double worst = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
  return {name, worst, tol, worst < tol};
}

}  // namespace

std::vector<io::CheckResult> gradient_suite(std::size_t instances) {
  std::vector<io::CheckResult> out;
  Rng rng = make_rng(20240, 1);

  for (const OpCase& c : op_cases()) {
    std::vector<double> errs;
    for (std::size_t i = 0; i < instances; ++i) {
      const std::vector<Tensor> inputs = c.make_inputs(rng);
      const Tensor w = random_tensor(rng, c.out_shape(inputs), -1.0, 1.0);
      const GraphFunction f = [&](Graph& g, std::span<const Var> v) {
        return weighted_sum(g, c.build(g, v), w);
      };
      errs.push_back(finite_diff_check(f, inputs, kStep).max_rel_error);
    }
    out.push_back(max_error_check("grad/" + c.name, errs, kGradTol));
  }

  const auto reduction = [&](const std::string& name, std::function<Var(Var)> op) {
    std::vector<double> errs;
    for (std::size_t i = 0; i < instances; ++i) {
      const Tensor x = random_tensor(rng, {7});
      errs.push_back(finite_diff_check([&](Graph&, Var v) { return op(v); }, x, kStep));
    }
    out.push_back(max_error_check("grad/" + name, errs, kGradTol));
  };
  reduction("sum", [](Var x) { return sum(x); });
  reduction("mean", [](Var x) { return mean(x); });
  reduction("log_sum_exp", [](Var x) { return log_sum_exp(x); });

  const auto batch_loss = [&](const std::string& name, std::function<Var(Var, Var)> loss) {
    std::vector<double> errs;
    for (std::size_t i = 0; i < instances; ++i) {
      const std::vector<Tensor> in{random_tensor(rng, {5, 1}), random_tensor(rng, {4, 1})};
      const GraphFunction f = [&](Graph&, std::span<const Var> v) { return loss(v[0], v[1]); };
      errs.push_back(finite_diff_check(f, in, kStep).max_rel_error);
    }
    out.push_back(max_error_check("grad/" + name, errs, kGradTol));
  };
  batch_loss("d_loss_softmax", [](Var r, Var f) { return d_loss_softmax(r, f); });
  batch_loss("g_loss_softmax", [](Var r, Var f) { return g_loss_softmax(r, f); });
  batch_loss("d_loss_gan_baseline", [](Var r, Var f) { return d_loss_gan_baseline(r, f); });
  batch_loss("g_loss_gan_nonsaturating", [](Var, Var f) { return g_loss_gan_nonsaturating(f); });

  // Analytic t − s against the graph.
  {
    std::vector<double> errs;
    for (std::size_t i = 0; i < instances; ++i) {
      const Tensor r = random_tensor(rng, {6});
      const Tensor f = random_tensor(rng, {6});
      Batch b{r.values(), f.values()};
      for (int which = 0; which < 2; ++which) {
        const LossWithGrad analytic = which == 0 ? d_loss_softmax(b) : g_loss_softmax(b);
        Graph g;
        Var vr = g.parameter(r), vf = g.parameter(f);
        Var loss = which == 0 ? d_loss_softmax(vr, vf) : g_loss_softmax(vr, vf);
        g.backward(loss);
        double worst = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
          worst = std::max(worst, relative_error(analytic.grad[j], g.grad(vr)[j]));
          worst = std::max(worst, relative_error(analytic.grad[6 + j], g.grad(vf)[j]));
        }
        errs.push_back(worst);
      }
    }
    out.push_back(max_error_check("grad/softmax_analytic_vs_autodiff", errs, kGradTol));
  }

  // Generator → discriminator composition, all parameters of both.
  {
    constexpr double kSignificantGrad = 1e-4;
    constexpr double kCompositeAbsTol = 1e-9;
    std::vector<double> errs, abs_errs;
    for (std::size_t i = 0; i < instances; ++i) {
      MlpSpec gen{{2, 8, 8, 2}, i % 2 ? HiddenActivation::kRelu : HiddenActivation::kLeakyRelu};
      MlpSpec dis{{2, 8, 1}, HiddenActivation::kLeakyRelu};
      const MlpParams gp = init_params(gen, 100 + i);
      const MlpParams dp = init_params(dis, 200 + i);
      std::vector<Tensor> inputs;
      for (const Tensor* t : gp.tensors()) inputs.push_back(*t);
      for (const Tensor* t : dp.tensors()) inputs.push_back(*t);
      const std::size_t n_gen = gp.tensors().size();
      // Biases start at zero; move them off so relu kinks are not probed.
      for (Tensor& t : inputs) {
        if (t.rank() == 1) t = random_tensor(rng, t.shape(), -0.5, 0.5);
      }
      const Tensor z = random_tensor(rng, {4, 2});
      const Tensor real = random_tensor(rng, {4, 2});
      const GraphFunction f = [&](Graph& g, std::span<const Var> v) {
        Var fake = forward(gen, v.subspan(0, n_gen), g.input(z));
        Var scores = forward(dis, v.subspan(n_gen), concat_rows(g.input(real), fake));
        return g_loss_softmax(slice_rows(scores, 0, 4), slice_rows(scores, 4, 8));
      };
      const GradCheckResult res = finite_diff_check(f, inputs, kStep);
      // Central differences carry ~1e-11 absolute roundoff here, which swamps the
      // relative measure on near-zero entries (the disc output bias is exactly 0).
      double rel = 0.0, abs_err = 0.0;
      for (std::size_t t = 0; t < res.analytic.size(); ++t) {
        for (std::size_t j = 0; j < res.analytic[t].size(); ++j) {
          const double a = res.analytic[t][j], n = res.numeric[t][j];
          abs_err = std::max(abs_err, std::abs(a - n));
          if (std::max(std::abs(a), std::abs(n)) >= kSignificantGrad) {
            rel = std::max(rel, relative_error(a, n));
          }
        }
      }
      errs.push_back(rel);
      abs_errs.push_back(abs_err);
    }
    out.push_back(max_error_check("grad/mlp_generator_discriminator", errs, kGradTol));
    out.push_back(max_error_check("grad/mlp_generator_discriminator_abs", abs_errs, kCompositeAbsTol));
  }
  return out;
}

namespace {

using theory::DiscreteDist;

DiscreteDist random_dist(Rng& rng, std::size_t k, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> m(k);
  for (double& v : m) v = u(rng);
  return DiscreteDist::from_masses(std::move(m));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::vector<io::CheckResult> theory_suite() {
  std::vector<io::CheckResult> out;
  Rng rng = make_rng(777, 2);

  // Closed-form spot values.
  {
    const double v = theory::kl(DiscreteDist({0.75, 0.25}), DiscreteDist({0.5, 0.5})) +
                     theory::kl(DiscreteDist({0.5, 0.5}), DiscreteDist({0.75, 0.25}));
    out.push_back({"theory/js_sum_k2_example", std::abs(v - 0.27465307216702742), 1e-12,
                   std::abs(v - 0.27465307216702742) < 1e-12});
    const double j = theory::mle_loss_exact(theory::EnergyModel{{0.0, std::log(3.0)}},
                                            theory::ObservedSet{{0}});
    out.push_back({"theory/mle_loss_k2_example", std::abs(j - std::log(4.0 / 3.0)), 1e-12,
                   std::abs(j - std::log(4.0 / 3.0)) < 1e-12});
  }

  // Exact MLE gradient vs a fourth-order central-difference stencil on J.
  {
    constexpr double h = 1e-3;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const DiscreteDist data = random_dist(rng, 6);
      theory::EnergyModel model{random_tensor(rng, {6}).values()};
      const std::vector<double> g = theory::mle_grad_exact(model, data);
      for (std::size_t i = 0; i < 6; ++i) {
        const auto at = [&](double offset) {
          theory::EnergyModel shifted = model;
          shifted.energies[i] += offset;
          return theory::mle_loss_exact(shifted, data);
        };
        const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        worst = std::max(worst, relative_error(g[i], fd));
      }
    }
    out.push_back({"theory/mle_grad_vs_finite_difference", worst, 1e-8, worst < 1e-8});
  }

  // Reparameterized softmax weights equal the r/R weights.
  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const std::size_t k = 2 + seed % 15;
      const Tensor mu = random_tensor(rng, {k});
      worst = std::max(worst, theory::reparam_grad_check(mu.values(), random_dist(rng, k), seed, 64));
    }
    out.push_back({"theory/reparam_identity", worst, 1e-12, worst < 1e-12});
  }

  // Estimator error shrinks with batch size.
  {
    const DiscreteDist data = random_dist(rng, 8);
    const DiscreteDist gen = random_dist(rng, 8);
    const DiscreteDist q = DiscreteDist::mixture(data, gen);
    theory::EnergyModel model{random_tensor(rng, {8}, -1.0, 1.0).values()};
    const std::vector<double> exact = theory::mle_grad_exact(model, data);
    std::vector<double> small, large;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      small.push_back(l2(theory::is_grad_estimate(model, data, q, 1000, seed), exact));
      large.push_back(l2(theory::is_grad_estimate(model, data, q, 100000, 1000 + seed), exact));
    }
    const double ratio = median(large) / median(small);
    out.push_back({"theory/is_error_ratio_1e5_vs_1e3", ratio, 0.2, ratio < 0.2});
  }

  // Optimal discriminator ratio and stationarity.
  {
    double worst_ratio = 0.0, worst_residual = 0.0;
    const std::size_t ks[] = {2, 4, 8, 16};
    for (int t = 0; t < 50; ++t) {
      const std::size_t k = ks[t % 4];
      const DiscreteDist pd = random_dist(rng, k);
      const DiscreteDist pg = random_dist(rng, k);
      const theory::FitResult fit = theory::optimal_discriminator_fit(pd, pg);
      const std::vector<double> got = theory::normalized_mass(fit.mu);
      std::vector<double> ratio(k);
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) total += ratio[i] = pd[i] / (0.5 * (pd[i] + pg[i]));
      for (std::size_t i = 0; i < k; ++i) worst_ratio = std::max(worst_ratio, std::abs(got[i] - ratio[i] / total));
      worst_residual = std::max(worst_residual, theory::first_order_residual(fit.mu, pd, pg));
    }
    out.push_back({"theory/optimal_discriminator_ratio", worst_ratio, 1e-6, worst_ratio < 1e-6});
    out.push_back({"theory/optimal_discriminator_residual", worst_residual, 1e-8, worst_residual < 1e-8});
  }

  // Generator objective tracks the symmetrized KL up to a constant.
  {
    const DiscreteDist pd = random_dist(rng, 8);
    double lo = INFINITY, hi = -INFINITY, worst_offset = 0.0;
    for (int t = 0; t < 100; ++t) {
      const theory::GeneratorDecomposition d =
          theory::generator_objective_decomposition(pd, random_dist(rng, 8));
      const double diff = d.population_l_g - d.js_sum;
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
      worst_offset = std::max(worst_offset, std::abs(diff - theory::decomposition_offset(pd)));
    }
    out.push_back({"theory/generator_objective_spread", hi - lo, 1e-8, hi - lo < 1e-8});
    out.push_back({"theory/generator_objective_offset", worst_offset, 1e-8, worst_offset < 1e-8});
  }

  // KL is non-negative.
  {
    double most_negative = 0.0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t k = 2 + t % 10;
      most_negative = std::min(most_negative, theory::kl(random_dist(rng, k, 0.0), random_dist(rng, k, 0.01)));
    }
    out.push_back({"theory/kl_nonnegative", -most_negative, 0.0, most_negative >= 0.0});
  }

  // Batch softmax-GAN gradient averages to the exact MLE gradient.
  {
    const DiscreteDist pd = random_dist(rng, 8);
    const DiscreteDist pg = random_dist(rng, 8);
    const DiscreteDist q = DiscreteDist::mixture(pd, pg);
    const Tensor mu = random_tensor(rng, {8}, -1.0, 1.0);
    theory::EnergyModel model;
    for (std::size_t i = 0; i < 8; ++i) model.energies.push_back(mu[i] - std::log(q[i]));
    const std::vector<double> exact = theory::mle_grad_exact(model, pd);
    constexpr int kSeeds = 50;
    std::vector<double> sum(8, 0.0), sum2(8, 0.0);
    for (int s = 0; s < kSeeds; ++s) {
      const std::vector<double> g = theory::softmax_d_grad_table(mu.values(), pd, pg, 2048, 2048, s);
      for (std::size_t i = 0; i < 8; ++i) {
        sum[i] += g[i];
        sum2[i] += g[i] * g[i];
      }
    }
    double worst_z = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      const double m = sum[i] / kSeeds;
      const double var = (sum2[i] - kSeeds * m * m) / (kSeeds - 1);
      const double se = std::sqrt(var / kSeeds);
      worst_z = std::max(worst_z, std::abs(m - exact[i]) / se);
    }
    out.push_back({"theory/batch_gradient_matches_mle_z", worst_z, 3.0, worst_z < 3.0});
  }
  return out;
}

}  // namespace smgan::checks
