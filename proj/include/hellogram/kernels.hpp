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

#pragma once

#include <cstddef>
#include <cstdint>

namespace hellogram::kernels {

/// Sum of table[i * 256 + bytes[i]] for i in [0, k).
///
/// `table` is a row-major k-or-longer x 256 matrix (log-probabilities in the
/// inference path). When `loads` is non-null it is incremented once per table
/// cell actually read, which the scoring complexity tests rely on.
using SumLogGatherFn = double (*)(const double* table, const uint8_t* bytes, size_t k,
                                  uint64_t* loads);

/// Exact integer sum of `n` uint32 values.
using RowSumU32Fn = uint64_t (*)(const uint32_t* row, size_t n);

/// out[i] = (double(row[i]) + add) * scale for i in [0, n).
/// All variants perform the identical per-element IEEE operation sequence,
/// so outputs are bit-identical across variants.
using RowSmoothScaleFn = void (*)(const uint32_t* row, size_t n, double add, double scale,
                                  double* out);

struct Kernels {
  const char* name;
  SumLogGatherFn sum_log_gather;
  RowSumU32Fn row_sum_u32;
  RowSmoothScaleFn row_smooth_scale;
};

/// Scalar reference implementations; always available.
const Kernels& scalar_kernels();

/// AVX2 implementations, or nullptr when the CPU (or build) lacks AVX2.
const Kernels* avx2_kernels();

/// Variant selected at process start: the widest supported instruction set,
/// overridable with HELLOGRAM_KERNELS=scalar|avx2 for testing.
const Kernels& active();

}  // namespace hellogram::kernels
