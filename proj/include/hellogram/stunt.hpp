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
#include <optional>
#include <string>

#include "hellogram/rng.hpp"
#include "hellogram/wire.hpp"

namespace hellogram::stunt {

enum class Kind { OrderedSwap, RandomFraction };

/// Whether an ordered swap may land on a position pair that includes a
/// GREASE value (which JA3 ignores, so such swaps leave its hash intact).
enum class GreaseMode { Include, ExcludeFromSwap };

struct PerturbationSpec {
  Kind kind = Kind::OrderedSwap;
  double fraction = 0.0;  // RandomFraction only; grid values 0.1..1.0
  GreaseMode grease_mode = GreaseMode::Include;
  uint64_t rng_seed = 0;
};

/// Swaps one uniformly chosen cipher suite with its right neighbor. Under
/// ExcludeFromSwap only pairs of two non-GREASE values are eligible; if no
/// pair qualifies the hello is returned unchanged. Throws ListTooShort for
/// fewer than two cipher suites.
wire::ParsedClientHello ordered_swap(const wire::ParsedClientHello& parsed, Rng& rng,
                                     GreaseMode grease_mode = GreaseMode::Include);

/// Applies a uniformly random rearrangement to round(fraction * n) cipher
/// positions chosen without replacement (at least 2, at most n). Fixed
/// points are allowed. Throws ListTooShort for fewer than two suites.
wire::ParsedClientHello random_fraction_permute(const wire::ParsedClientHello& parsed,
                                                double fraction, Rng& rng);

/// Serializes a (possibly perturbed) hello back to wire bytes with all
/// length fields recomputed, so downstream consumers only ever see bytes.
wire::RawClientHello reserialize(const wire::ParsedClientHello& parsed);

struct ApplyResult {
  wire::ParsedClientHello hello;
  bool modified = false;  // false when too short or no eligible swap pair
};

/// Harness-friendly wrapper: hellos that cannot be perturbed pass through
/// unmodified instead of raising.
ApplyResult apply(const PerturbationSpec& spec, const wire::ParsedClientHello& parsed, Rng& rng);

}  // namespace hellogram::stunt
