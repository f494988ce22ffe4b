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
#include "smgan/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "smgan/error.hpp"

namespace smgan {

double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

namespace {

double evaluate(const GraphFunction& f, const std::vector<Tensor>& inputs) {
  Graph g;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.push_back(g.input(t));
  return f(g, leaves).value().item();
}

}  // namespace

GradCheckResult finite_diff_check(const GraphFunction& f,
                                  const std::vector<Tensor>& inputs, double h) {
  if (!(h > 0.0)) throw ContractViolation("finite_diff_check: step must be positive");
  GradCheckResult result;
  {
    Graph g;
    std::vector<Var> leaves;
    leaves.reserve(inputs.size());
    for (const Tensor& t : inputs) leaves.push_back(g.parameter(t));
    Var root = f(g, leaves);
    g.backward(root);
    for (const Var& v : leaves) result.analytic.push_back(g.grad(v));
  }

  std::vector<Tensor> probe = inputs;
  for (std::size_t t = 0; t < probe.size(); ++t) {
    Tensor numeric(probe[t].shape());
    for (std::size_t i = 0; i < probe[t].size(); ++i) {
      const double x0 = probe[t][i];
      probe[t][i] = x0 + h;
      const double fp = evaluate(f, probe);
      probe[t][i] = x0 - h;
      const double fm = evaluate(f, probe);
      probe[t][i] = x0;
      numeric[i] = (fp - fm) / (2.0 * h);
      result.max_rel_error = std::max(result.max_rel_error,
                                      relative_error(result.analytic[t][i], numeric[i]));
    }
    result.numeric.push_back(std::move(numeric));
  }
  return result;
}

double finite_diff_check(const std::function<Var(Graph&, Var)>& f,
                         const Tensor& x, double h) {
  GraphFunction wrapped = [&f](Graph& g, std::span<const Var> v) { return f(g, v[0]); };
  return finite_diff_check(wrapped, {x}, h).max_rel_error;
}

}  // namespace smgan
