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

#include "hellogram/rng.hpp"

#include <numeric>

namespace hellogram {

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  if (k > n) k = n;
  // Partial Fisher-Yates: after j rounds the prefix idx[0..j) is a uniform
  // sample without replacement.
  for (size_t j = 0; j < k; ++j) {
    const size_t r = j + static_cast<size_t>(bounded(n - j));
    std::swap(idx[j], idx[r]);
  }
  idx.resize(k);
  return idx;
}

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> path) {
  uint64_t state = base;
  uint64_t out = splitmix64(state);
  for (uint64_t component : path) {
    state ^= component + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    out = splitmix64(state);
  }
  return out;
}

}  // namespace hellogram
