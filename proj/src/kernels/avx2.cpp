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
// Compiled with -mavx2 -mfma. Nothing in this file may run before the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>

#include "smgan/kernels.hpp"

namespace smgan::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8),
                           _mm256_loadu_pd(y + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12),
                           _mm256_loadu_pd(y + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

// c[row, j0..j0+16) += Σ_p coef(p) · b[p, j0..j0+16), with coef read at a
// stride so the same body serves a·b and aᵀ·b.
inline void accumulate_block16(const double* coef, std::size_t coef_stride,
                               const double* b, std::size_t k, std::size_t n,
                               std::size_t j0, double* crow) {
  __m256d c0 = _mm256_loadu_pd(crow + j0);
  __m256d c1 = _mm256_loadu_pd(crow + j0 + 4);
  __m256d c2 = _mm256_loadu_pd(crow + j0 + 8);
  __m256d c3 = _mm256_loadu_pd(crow + j0 + 12);
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d a = _mm256_broadcast_sd(coef + p * coef_stride);
    const double* brow = b + p * n + j0;
    c0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(brow), c0);
    c1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(brow + 4), c1);
    c2 = _mm256_fmadd_pd(a, _mm256_loadu_pd(brow + 8), c2);
    c3 = _mm256_fmadd_pd(a, _mm256_loadu_pd(brow + 12), c3);
  }
  _mm256_storeu_pd(crow + j0, c0);
  _mm256_storeu_pd(crow + j0 + 4, c1);
  _mm256_storeu_pd(crow + j0 + 8, c2);
  _mm256_storeu_pd(crow + j0 + 12, c3);
}

inline void accumulate_block4(const double* coef, std::size_t coef_stride,
                              const double* b, std::size_t k, std::size_t n,
                              std::size_t j0, double* crow) {
  __m256d c0 = _mm256_loadu_pd(crow + j0);
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d a = _mm256_broadcast_sd(coef + p * coef_stride);
    c0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(b + p * n + j0), c0);
  }
  _mm256_storeu_pd(crow + j0, c0);
}

inline void accumulate_row(const double* coef, std::size_t coef_stride,
                           const double* b, std::size_t k, std::size_t n,
                           double* crow) {
  std::size_t j = 0;
  for (; j + 16 <= n; j += 16) accumulate_block16(coef, coef_stride, b, k, n, j, crow);
  for (; j + 4 <= n; j += 4) accumulate_block4(coef, coef_stride, b, k, n, j, crow);
  for (; j < n; ++j) {
    double s = crow[j];
    for (std::size_t p = 0; p < k; ++p) s += coef[p * coef_stride] * b[p * n + j];
    crow[j] = s;
  }
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) accumulate_row(a + i * k, 1, b, k, n, c + i * n);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) accumulate_row(a + i, m, b, k, n, c + i * n);
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot(arow, b + j * k, k);
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void leaky_relu(const double* x, double* y, std::size_t n, double slope) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vs = _mm256_set1_pd(slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d pos = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(y + i, _mm256_blendv_pd(_mm256_mul_pd(vs, v), v, pos));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_grad(const double* x, const double* dy, double* dx,
                     std::size_t n, double slope) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vs = _mm256_set1_pd(slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pos = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    const __m256d scale = _mm256_blendv_pd(vs, one, pos);
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i),
                                           _mm256_mul_pd(scale, _mm256_loadu_pd(dy + i))));
  }
  for (; i < n; ++i) dx[i] += x[i] > 0.0 ? dy[i] : slope * dy[i];
}

void adam(double* param, const double* grad, double* m, double* v,
          std::size_t n, const AdamCoeffs& c) {
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d bias1 = _mm256_set1_pd(c.bias1);
  const __m256d bias2 = _mm256_set1_pd(c.bias2);
  const __m256d lr = _mm256_set1_pd(c.lr);
  const __m256d eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(omb1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bias1);
    const __m256d v_hat = _mm256_div_pd(vi, bias2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat),
                                       _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
  }
  const double one_m_b1 = 1.0 - c.beta1;
  const double one_m_b2 = 1.0 - c.beta2;
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_m_b1 * g;
    v[i] = c.beta2 * v[i] + one_m_b2 * (g * g);
    param[i] -= c.lr * (m[i] / c.bias1) / (std::sqrt(v[i] / c.bias2) + c.eps);
  }
}

constexpr KernelTable kAvx2Table{
    Isa::kAvx2, &gemm_nn,    &gemm_nt,         &gemm_tn, &dot,
    &axpy,      &leaky_relu, &leaky_relu_grad, &adam,
};

}  // namespace

const KernelTable* avx2_kernel_table() { return &kAvx2Table; }

}  // namespace smgan::kernels
