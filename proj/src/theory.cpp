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
#include "smgan/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "smgan/autodiff.hpp"
#include "smgan/error.hpp"
#include "smgan/losses.hpp"
#include "smgan/random.hpp"

namespace smgan::theory {

DiscreteDist::DiscreteDist(std::vector<double> p) : probs(std::move(p)) {
  if (probs.empty()) throw ContractViolation("distribution over zero states");
  double total = 0.0;
  for (double v : probs) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ContractViolation("distribution entries must be finite and non-negative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ContractViolation("distribution sums to " + std::to_string(total));
  }
}

DiscreteDist DiscreteDist::uniform(std::size_t k) {
  return DiscreteDist(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

DiscreteDist DiscreteDist::from_masses(std::vector<double> masses) {
  double total = 0.0;
  for (double v : masses) total += v;
  if (!(total > 0.0)) throw ContractViolation("masses must have a positive total");
  for (double& v : masses) v /= total;
  return DiscreteDist(std::move(masses));
}

DiscreteDist DiscreteDist::mixture(const DiscreteDist& a, const DiscreteDist& b) {
  if (a.size() != b.size()) throw DimensionError("mixture of distributions of different size");
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return DiscreteDist(std::move(m));
}

double EnergyModel::log_partition() const {
  std::vector<double> neg(energies);
  for (double& v : neg) v = -v;
  return log_sum_exp(neg);
}

std::vector<double> EnergyModel::density() const {
  const double lz = log_partition();
  std::vector<double> p(energies.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(-energies[i] - lz);
  return p;
}

DiscreteDist ObservedSet::empirical(std::size_t k) const {
  if (states.empty()) throw ContractViolation("observed set is empty");
  std::vector<double> counts(k, 0.0);
  for (std::size_t s : states) {
    if (s >= k) throw ContractViolation("observed state out of range");
    counts[s] += 1.0;
  }
  return DiscreteDist::from_masses(std::move(counts));
}

std::vector<std::size_t> sample_states(const DiscreteDist& q, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x5a11);
  std::discrete_distribution<std::size_t> pick(q.probs.begin(), q.probs.end());
  std::vector<std::size_t> out(n);
  for (std::size_t& s : out) s = pick(rng);
  return out;
}

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": sizes " + std::to_string(a) + " and " +
                         std::to_string(b));
  }
}

}  // namespace

double mle_loss_exact(const EnergyModel& model, const ObservedSet& observed) {
  if (observed.states.empty()) throw ContractViolation("observed set is empty");
  double data_term = 0.0;
  for (std::size_t s : observed.states) data_term += model.energies.at(s);
  return data_term / static_cast<double>(observed.states.size()) + model.log_partition();
}

double mle_loss_exact(const EnergyModel& model, const DiscreteDist& data) {
  require_same_size(model.size(), data.size(), "mle_loss_exact");
  double data_term = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] > 0.0) data_term += data[i] * model.energies[i];
  }
  return data_term + model.log_partition();
}

std::vector<double> mle_grad_exact(const EnergyModel& model, const DiscreteDist& data) {
  require_same_size(model.size(), data.size(), "mle_grad_exact");
  std::vector<double> g = model.density();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = data[i] - g[i];
  return g;
}

ISBatch importance_batch(const EnergyModel& model, const Proposal& q,
                         std::span<const std::size_t> states) {
  require_same_size(model.size(), q.size(), "importance_batch");
  if (states.empty()) throw ContractViolation("importance batch needs n_samples >= 1");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0 && std::isfinite(model.energies[i])) {
      throw ContractViolation("proposal has zero mass at state " + std::to_string(i) +
                              " where the model has positive mass");
    }
  }
  ISBatch b;
  b.states.assign(states.begin(), states.end());
  b.log_weights.resize(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    const std::size_t s = states[j];
    b.log_weights[j] = -model.energies[s] - std::log(q[s]);
  }
  b.log_normalizer = log_sum_exp(b.log_weights);
  b.weights = softmax(b.log_weights);
  return b;
}

ISBatch importance_batch(const EnergyModel& model, const Proposal& q, std::size_t n,
                         std::uint64_t seed) {
  if (n == 0) throw ContractViolation("importance batch needs n_samples >= 1");
  const std::vector<std::size_t> states = sample_states(q, n, seed);
  return importance_batch(model, q, states);
}

std::vector<double> is_grad_estimate(const EnergyModel& model, const DiscreteDist& data,
                                     const Proposal& q, std::size_t n_samples,
                                     std::uint64_t seed) {
  require_same_size(model.size(), data.size(), "is_grad_estimate");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0 && data[i] > 0.0) {
      throw ContractViolation("proposal has zero mass at state " + std::to_string(i) +
                              " where the data has positive mass");
    }
  }
  const ISBatch b = importance_batch(model, q, n_samples, seed);
  std::vector<double> g(data.probs);
  for (std::size_t j = 0; j < b.states.size(); ++j) g[b.states[j]] -= b.weights[j];
  return g;
}

ReparamForms reparam_forms(std::span<const double> mu_table, const Proposal& q,
                           std::span<const std::size_t> states) {
  require_same_size(mu_table.size(), q.size(), "reparam_forms");
  EnergyModel model;
  model.energies.resize(mu_table.size());
  for (std::size_t i = 0; i < mu_table.size(); ++i) {
    model.energies[i] = mu_table[i] - std::log(q[i]);
  }
  const ISBatch b = importance_batch(model, q, states);

  std::vector<double> scores(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) scores[j] = mu_table[states[j]];
  const std::vector<double> s = batch_softmax(scores);

  ReparamForms out;
  out.importance.assign(mu_table.size(), 0.0);
  out.softmax.assign(mu_table.size(), 0.0);
  for (std::size_t j = 0; j < states.size(); ++j) {
    out.importance[states[j]] += b.weights[j];
    out.softmax[states[j]] += s[j];
  }
  return out;
}

double reparam_grad_check(std::span<const double> mu_table, const Proposal& q,
                          std::uint64_t seed, std::size_t n_samples) {
  const std::vector<std::size_t> states = sample_states(q, n_samples, seed);
  const ReparamForms f = reparam_forms(mu_table, q, states);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.softmax.size(); ++i) {
    worst = std::max(worst, std::abs(f.importance[i] - f.softmax[i]));
  }
  return worst;
}

std::vector<double> softmax_d_grad_table(std::span<const double> mu_table,
                                         const DiscreteDist& p_data, const DiscreteDist& p_gen,
                                         std::size_t n_real, std::size_t n_fake,
                                         std::uint64_t seed) {
  require_same_size(mu_table.size(), p_data.size(), "softmax_d_grad_table");
  require_same_size(p_data.size(), p_gen.size(), "softmax_d_grad_table");
  const std::vector<std::size_t> real = sample_states(p_data, n_real, seed * 2 + 0);
  const std::vector<std::size_t> fake = sample_states(p_gen, n_fake, seed * 2 + 1);
  Batch batch;
  for (std::size_t s : real) batch.real_scores.push_back(mu_table[s]);
  for (std::size_t s : fake) batch.fake_scores.push_back(mu_table[s]);
  const LossWithGrad loss = d_loss_softmax(batch);
  std::vector<double> g(mu_table.size(), 0.0);
  for (std::size_t j = 0; j < real.size(); ++j) g[real[j]] += loss.grad[j];
  for (std::size_t j = 0; j < fake.size(); ++j) g[fake[j]] += loss.grad[real.size() + j];
  return g;
}

namespace {

// ln Σ q e^{-μ} over states with q > 0 and finite μ.
double log_weighted_partition(std::span<const double> mu, const DiscreteDist& q) {
  std::vector<double> terms;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (q[i] > 0.0 && std::isfinite(mu[i])) terms.push_back(std::log(q[i]) - mu[i]);
  }
  return log_sum_exp(terms);
}

// q e^{-μ} / Σ q e^{-μ}
std::vector<double> tilted(std::span<const double> mu, const DiscreteDist& q) {
  const double lc = log_weighted_partition(mu, q);
  std::vector<double> w(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (q[i] > 0.0 && std::isfinite(mu[i])) w[i] = std::exp(std::log(q[i]) - mu[i] - lc);
  }
  return w;
}

}  // namespace

double population_d_objective(std::span<const double> mu, const DiscreteDist& p_data,
                              const DiscreteDist& p_gen) {
  require_same_size(mu.size(), p_data.size(), "population_d_objective");
  const DiscreteDist q = DiscreteDist::mixture(p_data, p_gen);
  double data_term = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (p_data[i] > 0.0) data_term += p_data[i] * mu[i];
  }
  return data_term + log_weighted_partition(mu, q);
}

std::vector<double> population_d_gradient(std::span<const double> mu,
                                          const DiscreteDist& p_data,
                                          const DiscreteDist& p_gen) {
  require_same_size(mu.size(), p_data.size(), "population_d_gradient");
  const DiscreteDist q = DiscreteDist::mixture(p_data, p_gen);
  std::vector<double> g = tilted(mu, q);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = p_data[i] - g[i];
  return g;
}

FitResult optimal_discriminator_fit(const DiscreteDist& p_data, const DiscreteDist& p_gen,
                                    const FitOptions& options) {
  require_same_size(p_data.size(), p_gen.size(), "optimal_discriminator_fit");
  const std::size_t k = p_data.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (p_data[i] + p_gen[i] <= 0.0) {
      throw ContractViolation("p_D + p_G vanishes at state " + std::to_string(i));
    }
  }
  FitResult r;
  r.mu = options.initial_mu.empty() ? std::vector<double>(k, 0.0) : options.initial_mu;
  require_same_size(r.mu.size(), k, "optimal_discriminator_fit initial_mu");
  // States without data mass have their optimum at +∞.
  for (std::size_t i = 0; i < k; ++i) {
    if (p_data[i] == 0.0) r.mu[i] = kInfinity;
  }

  for (r.iterations = 0;; ++r.iterations) {
    const std::vector<double> g = population_d_gradient(r.mu, p_data, p_gen);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (std::isfinite(r.mu[i])) norm2 += g[i] * g[i];
    }
    r.residual = std::sqrt(norm2);
    if (r.residual < options.tolerance) break;
    if (r.iterations >= options.max_iterations) {
      throw ConvergenceError("discriminator fit did not converge in " +
                                 std::to_string(options.max_iterations) +
                                 " iterations (gradient norm " + std::to_string(r.residual) + ")",
                             r.residual);
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (std::isfinite(r.mu[i])) r.mu[i] -= options.step * g[i];
    }
  }
  r.log_c = log_weighted_partition(r.mu, DiscreteDist::mixture(p_data, p_gen));
  return r;
}

std::vector<double> normalized_mass(std::span<const double> mu) {
  std::vector<double> neg;
  for (double v : mu) {
    if (std::isfinite(v)) neg.push_back(-v);
  }
  const double lse = log_sum_exp(neg);
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (std::isfinite(mu[i])) out[i] = std::exp(-mu[i] - lse);
  }
  return out;
}

double first_order_residual(std::span<const double> mu, const DiscreteDist& p_data,
                            const DiscreteDist& p_gen) {
  const std::vector<double> g = population_d_gradient(mu, p_data, p_gen);
  double worst = 0.0;
  for (double v : g) worst = std::max(worst, std::abs(v));
  return worst;
}

double kl(const DiscreteDist& p, const DiscreteDist& q) {
  require_same_size(p.size(), q.size(), "kl");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInfinity;
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

GeneratorDecomposition generator_objective_decomposition(const DiscreteDist& p_data,
                                                         const DiscreteDist& p_gen,
                                                         const FitOptions& options) {
  require_same_size(p_data.size(), p_gen.size(), "generator_objective_decomposition");
  const DiscreteDist m = DiscreteDist::mixture(p_data, p_gen);
  GeneratorDecomposition d;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 0.0 && p_data[i] == 0.0) {
      d.finite = false;
      d.lhs_kl = d.lhs_from_scores = d.population_l_g = d.js_sum = kInfinity;
      d.rhs_surrogate = 0.0;
      return d;
    }
  }
  d.lhs_kl = kl(m, p_data);
  d.js_sum = d.lhs_kl + kl(p_data, m);

  const FitResult fit = optimal_discriminator_fit(p_data, p_gen, options);
  double mean_score = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 0.0) mean_score += m[i] * fit.mu[i];
  }
  d.lhs_from_scores = mean_score + fit.log_c;

  const std::vector<double> w = tilted(fit.mu, m);
  d.rhs_surrogate = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (w[i] > 0.0) d.rhs_surrogate -= w[i] * std::log(p_data[i] + p_gen[i]);
  }
  d.population_l_g = d.lhs_from_scores + d.rhs_surrogate;
  return d;
}

double decomposition_offset(const DiscreteDist& p_data) {
  double s = 0.0;
  for (double p : p_data.probs) {
    if (p > 0.0) s -= p * std::log(2.0 * p);
  }
  return s;
}

std::vector<double> generator_rhs_gradient_estimate(const DiscreteDist& p_data,
                                                    const DiscreteDist& p_gen,
                                                    std::size_t n, std::uint64_t seed) {
  require_same_size(p_data.size(), p_gen.size(), "generator_rhs_gradient_estimate");
  const DiscreteDist m = DiscreteDist::mixture(p_data, p_gen);
  const std::vector<std::size_t> states = sample_states(m, n, seed);
  std::vector<double> num(p_data.size(), 0.0);
  double den = 0.0;
  for (std::size_t s : states) {
    const double w = p_data[s] / m[s];
    num[s] += w / (p_data[s] + p_gen[s]);
    den += w;
  }
  if (den > 0.0) {
    for (double& v : num) v /= den;
  }
  return num;
}

std::vector<double> generator_rhs_gradient_exact(const DiscreteDist& p_data,
                                                 const DiscreteDist& p_gen) {
  std::vector<double> out(p_data.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (p_data[i] > 0.0) out[i] = p_data[i] / (p_data[i] + p_gen[i]);
  }
  return out;
}

}  // namespace smgan::theory
