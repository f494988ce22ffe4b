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

// Self-contained verification suites run by the CLI. Each returns one
// CheckResult per named property.

#include <vector>

#include "smgan/io.hpp"

namespace smgan::checks {

// Finite-difference checks for every graph operation, both softmax losses,
// the logistic baselines, and MLP compositions.
std::vector<io::CheckResult> gradient_suite(std::size_t instances = 20);

// Exact and statistical checks of the importance-sampling theory on finite
// state spaces.
std::vector<io::CheckResult> theory_suite();

}  // namespace smgan::checks
