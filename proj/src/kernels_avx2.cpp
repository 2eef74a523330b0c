// Copyright (c) 2026 The hellogram authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// This translation unit is built with -mavx2 on x86-64. avx2_kernels() gates
// the table behind a runtime CPU check, so merely linking it is safe on CPUs
// without AVX2.

#include "hellogram/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstring>

namespace hellogram::kernels {

namespace {

double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double sum_log_gather_avx2(const double* table, const uint8_t* bytes, size_t k,
                           uint64_t* loads) {
  __m256d acc = _mm256_setzero_pd();
  const __m128i lane_offsets = _mm_setr_epi32(0, 256, 512, 768);
  size_t i = 0;
  for (; i + 4 <= k; i += 4) {
    uint32_t packed;
    std::memcpy(&packed, bytes + i, 4);
    const __m128i b = _mm_cvtepu8_epi32(_mm_cvtsi32_si128(static_cast<int>(packed)));
    const __m128i base = _mm_add_epi32(_mm_set1_epi32(static_cast<int>(i * 256)), lane_offsets);
    const __m128i idx = _mm_add_epi32(base, b);
    acc = _mm256_add_pd(acc, _mm256_i32gather_pd(table, idx, 8));
    if (loads) *loads += 4;
  }
  double sum = hsum256(acc);
  for (; i < k; ++i) {
    sum += table[i * 256 + bytes[i]];
    if (loads) ++*loads;
  }
  return sum;
}

uint64_t row_sum_u32_avx2(const uint32_t* row, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i v = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row + i));
    acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(v));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) sum += row[i];
  return sum;
}

void row_smooth_scale_avx2(const uint32_t* row, size_t n, double add, double scale,
                           double* out) {
  // Signed int32 -> double convert; counts are far below 2^31 in practice
  // (one increment per unique training sequence).
  const __m256d vadd = _mm256_set1_pd(add);
  const __m256d vscale = _mm256_set1_pd(scale);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i v = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row + i));
    const __m256d d = _mm256_cvtepi32_pd(v);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_add_pd(d, vadd), vscale));
  }
  for (; i < n; ++i) {
    out[i] = (static_cast<double>(row[i]) + add) * scale;
  }
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{"avx2", sum_log_gather_avx2, row_sum_u32_avx2, row_smooth_scale_avx2};
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  return &k;
}

}  // namespace hellogram::kernels

#else  // !defined(__AVX2__)

namespace hellogram::kernels {

const Kernels* avx2_kernels() { return nullptr; }

}  // namespace hellogram::kernels

#endif
