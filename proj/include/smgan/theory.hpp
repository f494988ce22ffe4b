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

// Exact checks of the importance-sampling view of the batch-softmax losses
// on a finite state space {0, ..., K-1}, where every partition function is
// a finite sum.
//
// Energy model ξ induces p(x) = e^{-ξ(x)} / Z. Maximum likelihood on data
// minimizes J = E_data[ξ] + ln Σ e^{-ξ}; for a table parameterization its
// gradient at state x is p_data(x) − p(x). Self-normalized importance
// sampling replaces p with weights r(x')/R, r = e^{-ξ}/q, over a batch
// drawn from a proposal q. Substituting e^{-ξ} = e^{-μ} q turns those
// weights into the batch softmax of the discriminator scores μ.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace smgan::theory {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct DiscreteDist {
  std::vector<double> probs;

  DiscreteDist() = default;
  // Throws ContractViolation on negative entries or a sum off by > 1e-12.
  explicit DiscreteDist(std::vector<double> p);
  static DiscreteDist uniform(std::size_t k);
  // Normalizes non-negative masses.
  static DiscreteDist from_masses(std::vector<double> masses);
  static DiscreteDist mixture(const DiscreteDist& a, const DiscreteDist& b);

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

struct EnergyModel {
  std::vector<double> energies;  // ξ

  std::size_t size() const { return energies.size(); }
  double log_partition() const;       // ln Σ e^{-ξ}
  std::vector<double> density() const;  // e^{-ξ} / Z
};

using Proposal = DiscreteDist;

struct ObservedSet {
  std::vector<std::size_t> states;
  DiscreteDist empirical(std::size_t k) const;
};

struct ISBatch {
  std::vector<std::size_t> states;  // Q, drawn from q
  std::vector<double> log_weights;  // ln r(x') = −ξ(x') − ln q(x')
  std::vector<double> weights;      // r(x') / R; sums to 1
  double log_normalizer = 0.0;      // ln R
};

// Draws i.i.d. states from q. Deterministic per seed.
std::vector<std::size_t> sample_states(const DiscreteDist& q, std::size_t n, std::uint64_t seed);

double mle_loss_exact(const EnergyModel& model, const ObservedSet& observed);
// J with the observed set replaced by its distribution.
double mle_loss_exact(const EnergyModel& model, const DiscreteDist& data);
std::vector<double> mle_grad_exact(const EnergyModel& model, const DiscreteDist& data);

// Throws ContractViolation when q vanishes on a state the model (or data)
// gives mass.
ISBatch importance_batch(const EnergyModel& model, const Proposal& q,
                         std::span<const std::size_t> states);
ISBatch importance_batch(const EnergyModel& model, const Proposal& q, std::size_t n,
                         std::uint64_t seed);

// p_data(x) − Σ_{x'∈Q, x'=x} r(x')/R. The data term is exact; only the
// model expectation is estimated.
std::vector<double> is_grad_estimate(const EnergyModel& model, const DiscreteDist& data,
                                     const Proposal& q, std::size_t n_samples,
                                     std::uint64_t seed);

struct ReparamForms {
  std::vector<double> importance;  // r/R written in terms of ξ = μ − ln q
  std::vector<double> softmax;     // e^{-μ} / Σ_Q e^{-μ}
};

// Per-state aggregated negative-phase weights of both forms on one batch.
ReparamForms reparam_forms(std::span<const double> mu_table, const Proposal& q,
                           std::span<const std::size_t> states);
// Max |importance − softmax| on a batch of n_samples drawn from q.
double reparam_grad_check(std::span<const double> mu_table, const Proposal& q,
                          std::uint64_t seed, std::size_t n_samples);

// ∂L_D/∂μ on a table discriminator for one batch: B₊ drawn from p_D, B₋
// from p_G, contributions t_D − s summed per state.
std::vector<double> softmax_d_grad_table(std::span<const double> mu_table,
                                         const DiscreteDist& p_data, const DiscreteDist& p_gen,
                                         std::size_t n_real, std::size_t n_fake,
                                         std::uint64_t seed);

// L(μ) = Σ p_D μ + ln Σ q e^{-μ}, q = (p_D + p_G)/2.
double population_d_objective(std::span<const double> mu, const DiscreteDist& p_data,
                              const DiscreteDist& p_gen);
std::vector<double> population_d_gradient(std::span<const double> mu,
                                          const DiscreteDist& p_data,
                                          const DiscreteDist& p_gen);

struct FitOptions {
  double step = 0.5;
  std::size_t max_iterations = 100000;
  double tolerance = 1e-10;  // on the gradient's Euclidean norm
  std::vector<double> initial_mu;  // zeros when empty
};

struct FitResult {
  std::vector<double> mu;  // +∞ on states where p_D = 0
  std::size_t iterations = 0;
  double residual = 0.0;
  double log_c = 0.0;  // ln Σ q e^{-μ}
};

// Gradient descent on the convex population objective. Throws
// ConvergenceError (carrying the residual) if the tolerance is not met.
FitResult optimal_discriminator_fit(const DiscreteDist& p_data, const DiscreteDist& p_gen,
                                    const FitOptions& options = {});

// e^{-μ} / Σ e^{-μ}
std::vector<double> normalized_mass(std::span<const double> mu);
// |p_D(x) − q(x)e^{-μ(x)} / Σ q e^{-μ}|_∞
double first_order_residual(std::span<const double> mu, const DiscreteDist& p_data,
                            const DiscreteDist& p_gen);

// Σ p ln(p/q), 0 ln 0 = 0, +∞ when p > 0 = q.
double kl(const DiscreteDist& p, const DiscreteDist& q);

struct GeneratorDecomposition {
  bool finite = true;
  double lhs_kl = 0.0;           // KL(m ‖ p_D)
  double lhs_from_scores = 0.0;  // Σ m μ* + ln C at the fitted optimum
  double rhs_surrogate = 0.0;    // −Σ w* ln(p_D + p_G), w* = m e^{-μ*}/C
  double population_l_g = 0.0;   // lhs_from_scores + rhs_surrogate
  double js_sum = 0.0;           // KL(m ‖ p_D) + KL(p_D ‖ m)
};

// Population generator objective at the optimal discriminator, next to the
// symmetrized KL it should track up to a p_G-independent constant.
// Support violations return finite = false with infinite values.
GeneratorDecomposition generator_objective_decomposition(const DiscreteDist& p_data,
                                                         const DiscreteDist& p_gen,
                                                         const FitOptions& options = {});

// −E_{p_D} ln 2p_D, the constant separating population_l_g from js_sum.
double decomposition_offset(const DiscreteDist& p_data);

// Self-normalized batch form of the generator's partition-term gradient
// with respect to the table p_G: batch B from m, weights p_D/m, per-state
// value 1/(p_D+p_G). Converges to p_D/(p_D+p_G).
std::vector<double> generator_rhs_gradient_estimate(const DiscreteDist& p_data,
                                                    const DiscreteDist& p_gen,
                                                    std::size_t n, std::uint64_t seed);
std::vector<double> generator_rhs_gradient_exact(const DiscreteDist& p_data,
                                                 const DiscreteDist& p_gen);

}  // namespace smgan::theory
