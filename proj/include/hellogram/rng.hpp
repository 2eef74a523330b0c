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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace hellogram {

/// Portable seeded random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard, and bounded draws use rejection sampling on raw 64-bit words
/// rather than std::uniform_int_distribution (whose mapping is
/// implementation-defined). Two builds on different platforms therefore
/// replay identical trial streams from the same seed.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t bounded(uint64_t n) {
    // Reject the tail of the 64-bit range that would bias the modulus.
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  /// In-place Fisher-Yates shuffle, uniform over all permutations.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(bounded(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// First k entries of a uniform sample without replacement from [0, n).
  std::vector<size_t> sample_indices(size_t n, size_t k);

private:
  std::mt19937_64 engine_;
};

/// splitmix64 step; used to mix seed components.
uint64_t splitmix64(uint64_t& state);

/// Derives an independent stream seed from a base seed and an index path
/// (for example {fold, trial, fraction_index}) by chaining splitmix64.
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> path);

}  // namespace hellogram
