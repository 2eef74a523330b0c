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

#include "hellogram/kernels.hpp"

namespace hellogram::kernels {

namespace {

double sum_log_gather_scalar(const double* table, const uint8_t* bytes, size_t k,
                             uint64_t* loads) {
  double sum = 0.0;
  for (size_t i = 0; i < k; ++i) {
    sum += table[i * 256 + bytes[i]];
    if (loads) ++*loads;
  }
  return sum;
}

uint64_t row_sum_u32_scalar(const uint32_t* row, size_t n) {
  uint64_t sum = 0;
  for (size_t i = 0; i < n; ++i) sum += row[i];
  return sum;
}

void row_smooth_scale_scalar(const uint32_t* row, size_t n, double add, double scale,
                             double* out) {
  for (size_t i = 0; i < n; ++i) {
    out[i] = (static_cast<double>(row[i]) + add) * scale;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", sum_log_gather_scalar, row_sum_u32_scalar,
                         row_smooth_scale_scalar};
  return k;
}

}  // namespace hellogram::kernels
