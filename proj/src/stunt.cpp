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

#include "hellogram/stunt.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "hellogram/errors.hpp"
#include "hellogram/ja3.hpp"

namespace hellogram::stunt {

wire::ParsedClientHello ordered_swap(const wire::ParsedClientHello& parsed, Rng& rng,
                                     GreaseMode grease_mode) {
  const size_t n = parsed.cipher_suites.size();
  if (n < 2) {
    raise(Errc::ListTooShort, "ordered swap needs at least 2 cipher suites, have " +
                                  std::to_string(n) + " (" + parsed.source_id + ")");
  }

  wire::ParsedClientHello out = parsed;
  if (grease_mode == GreaseMode::Include) {
    const size_t i = static_cast<size_t>(rng.bounded(n - 1));
    std::swap(out.cipher_suites[i], out.cipher_suites[i + 1]);
    return out;
  }

  std::vector<size_t> eligible;
  for (size_t i = 0; i + 1 < n; ++i) {
    if (!ja3::is_grease(parsed.cipher_suites[i]) && !ja3::is_grease(parsed.cipher_suites[i + 1])) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    return out;  // nothing to swap without touching a GREASE value
  }
  const size_t i = eligible[static_cast<size_t>(rng.bounded(eligible.size()))];
  std::swap(out.cipher_suites[i], out.cipher_suites[i + 1]);
  return out;
}

namespace {

bool has_non_grease_pair(const std::vector<uint16_t>& suites) {
  for (size_t i = 0; i + 1 < suites.size(); ++i) {
    if (!ja3::is_grease(suites[i]) && !ja3::is_grease(suites[i + 1])) return true;
  }
  return false;
}

}  // namespace

wire::ParsedClientHello random_fraction_permute(const wire::ParsedClientHello& parsed,
                                                double fraction, Rng& rng) {
  const size_t n = parsed.cipher_suites.size();
  if (n < 2) {
    raise(Errc::ListTooShort, "fraction permute needs at least 2 cipher suites, have " +
                                  std::to_string(n) + " (" + parsed.source_id + ")");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    raise(Errc::InvalidProfile, "fraction must be in (0, 1], got " + std::to_string(fraction));
  }

  // A single selected element cannot rearrange, so the requested count is
  // floored at 2.
  size_t k = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
  k = std::max<size_t>(k, 2);
  k = std::min(k, n);

  std::vector<size_t> chosen = rng.sample_indices(n, k);
  std::sort(chosen.begin(), chosen.end());

  std::vector<uint16_t> values;
  values.reserve(k);
  for (size_t idx : chosen) values.push_back(parsed.cipher_suites[idx]);
  rng.shuffle(values);

  wire::ParsedClientHello out = parsed;
  for (size_t j = 0; j < k; ++j) out.cipher_suites[chosen[j]] = values[j];
  return out;
}

wire::RawClientHello reserialize(const wire::ParsedClientHello& parsed) {
  return wire::RawClientHello{wire::serialize(parsed), parsed.source_id};
}

ApplyResult apply(const PerturbationSpec& spec, const wire::ParsedClientHello& parsed, Rng& rng) {
  if (parsed.cipher_suites.size() < 2) {
    return {parsed, false};
  }
  switch (spec.kind) {
    case Kind::OrderedSwap: {
      if (spec.grease_mode == GreaseMode::ExcludeFromSwap &&
          !has_non_grease_pair(parsed.cipher_suites)) {
        return {parsed, false};
      }
      return {ordered_swap(parsed, rng, spec.grease_mode), true};
    }
    case Kind::RandomFraction:
      return {random_fraction_permute(parsed, spec.fraction, rng), true};
  }
  return {parsed, false};
}

}  // namespace hellogram::stunt
