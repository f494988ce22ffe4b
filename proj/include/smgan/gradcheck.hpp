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

#include <functional>
#include <span>
#include <vector>

#include "smgan/autodiff.hpp"

namespace smgan {

// Builds a scalar-valued graph from leaves bound to the given inputs.
using GraphFunction = std::function<Var(Graph&, std::span<const Var>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::vector<Tensor> analytic;
  std::vector<Tensor> numeric;
};

// Central differences (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h on every coordinate of
// every input, compared to backward(). Relative error per coordinate is
// |a−n| / max(|a|, |n|, 1e-8).
GradCheckResult finite_diff_check(const GraphFunction& f,
                                  const std::vector<Tensor>& inputs,
                                  double h = 1e-5);

double finite_diff_check(const std::function<Var(Graph&, Var)>& f,
                         const Tensor& x, double h = 1e-5);

double relative_error(double a, double b);

}  // namespace smgan
