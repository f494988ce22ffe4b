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

// Dense inner loops behind the tensor graph. Each entry point has a scalar
// reference implementation; an AVX2+FMA variant is selected at runtime when
// the CPU supports it. Set SMGAN_KERNELS=scalar to force the reference path.
//
// All matrices are row-major and every routine *accumulates* into its
// output.

#include <cstddef>
#include <string_view>
#include <vector>

namespace smgan::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct AdamCoeffs {
  double lr = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double eps = 0.0;
  // 1 - beta^t for the bias corrections.
  double bias1 = 1.0;
  double bias2 = 1.0;
};

struct KernelTable {
  Isa isa;

  // c[m×n] += a[m×k] · b[k×n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // c[m×n] += a[m×k] · b[n×k]ᵀ
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // c[m×n] += a[k×m]ᵀ · b[k×n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);

  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha · x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // y = x > 0 ? x : slope·x   (relu is slope 0)
  void (*leaky_relu)(const double* x, double* y, std::size_t n, double slope);
  // dx += dy · (x > 0 ? 1 : slope)
  void (*leaky_relu_grad)(const double* x, const double* dy, double* dx,
                          std::size_t n, double slope);

  // In-place Adam update of one parameter block.
  void (*adam)(double* param, const double* grad, double* m, double* v,
               std::size_t n, const AdamCoeffs& c);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

bool supported(Isa isa);
std::vector<Isa> supported_isas();
const KernelTable& table(Isa isa);

// The process-wide table, chosen once on first use.
const KernelTable& active();

}  // namespace smgan::kernels
