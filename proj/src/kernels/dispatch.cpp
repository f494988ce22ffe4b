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
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "smgan/kernels.hpp"

namespace smgan::kernels {

#if defined(SMGAN_HAVE_AVX2)
const KernelTable* avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(SMGAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* env = std::getenv("SMGAN_KERNELS");
  if (env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return scalar_table();
    if (want == "avx2") {
      if (const KernelTable* t = avx2_table()) return *t;
      throw std::runtime_error("SMGAN_KERNELS=avx2 but AVX2/FMA is unavailable");
    }
    if (!want.empty() && want != "auto") {
      throw std::runtime_error("unknown SMGAN_KERNELS value '" + want + "'");
    }
  }
  if (const KernelTable* t = avx2_table()) return *t;
  return scalar_table();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_table() {
#if defined(SMGAN_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: return avx2_table() != nullptr;
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::kScalar};
  if (supported(Isa::kAvx2)) out.push_back(Isa::kAvx2);
  return out;
}

const KernelTable& table(Isa isa) {
  if (isa == Isa::kAvx2) {
    if (const KernelTable* t = avx2_table()) return *t;
    throw std::runtime_error("AVX2 kernels are not available on this CPU");
  }
  return scalar_table();
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace smgan::kernels
