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

#include <cstdlib>
#include <cstring>

namespace hellogram::kernels {

namespace {

const Kernels& select() {
  if (const char* wanted = std::getenv("HELLOGRAM_KERNELS")) {
    if (std::strcmp(wanted, "scalar") == 0) return scalar_kernels();
    if (std::strcmp(wanted, "avx2") == 0) {
      if (const Kernels* k = avx2_kernels()) return *k;
      return scalar_kernels();
    }
  }
  if (const Kernels* k = avx2_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const Kernels& active() {
  static const Kernels& chosen = select();
  return chosen;
}

}  // namespace hellogram::kernels
