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

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "hellogram/hello_builder.hpp"
#include "hellogram/ja3.hpp"
#include "hellogram/rng.hpp"
#include "hellogram/wire.hpp"

namespace hellogram::testutil {

struct RandomHelloOptions {
  size_t min_ciphers = 2;
  size_t max_ciphers = 24;
  bool force_grease_cipher = false;   // guarantees one GREASE value with a neighbor
  bool distinct_ciphers = true;
  bool allow_bare = true;             // sometimes drop the record header
};

/// A structurally valid ClientHello with randomized content: cipher count,
/// session id, extension selection and bodies all vary.
inline wire::RawClientHello random_hello(Rng& rng, const RandomHelloOptions& opts = {},
                                         std::string source_id = "random") {
  HelloBuilder b;

  std::array<uint8_t, 32> rnd{};
  for (auto& v : rnd) v = static_cast<uint8_t>(rng.bounded(256));
  b.random(rnd);

  if (rng.bounded(2) == 0) {
    Bytes sid(32);
    for (auto& v : sid) v = static_cast<uint8_t>(rng.bounded(256));
    b.session_id(std::move(sid));
  }

  const size_t span = opts.max_ciphers - opts.min_ciphers + 1;
  const size_t n = opts.min_ciphers + static_cast<size_t>(rng.bounded(span));
  std::vector<uint16_t> suites;
  suites.reserve(n);
  while (suites.size() < n) {
    const auto value = static_cast<uint16_t>(rng.bounded(0x10000));
    if (ja3::is_grease(value)) continue;  // GREASE inserted deliberately below
    if (opts.distinct_ciphers &&
        std::find(suites.begin(), suites.end(), value) != suites.end()) {
      continue;
    }
    suites.push_back(value);
  }
  if (opts.force_grease_cipher) {
    const size_t pos = static_cast<size_t>(rng.bounded(suites.size()));
    suites[pos] = ja3::kGreaseValues[rng.bounded(ja3::kGreaseValues.size())];
  }
  b.ciphers(std::move(suites));

  if (rng.bounded(4) == 0) {
    b.compressions({0x01, 0x00});
  }

  if (rng.bounded(8) == 0) {
    b.no_extensions();
  } else {
    if (rng.bounded(2) == 0) b.server_name("host" + std::to_string(rng.bounded(1000)) + ".test");
    if (rng.bounded(2) == 0) b.extension(0x0017, {});
    if (rng.bounded(2) == 0) {
      std::vector<uint16_t> groups;
      const size_t g = 1 + rng.bounded(4);
      for (size_t i = 0; i < g; ++i) {
        groups.push_back(static_cast<uint16_t>(0x0017 + rng.bounded(8)));
      }
      b.supported_groups(groups);
    }
    if (rng.bounded(2) == 0) b.ec_point_formats({0x00});
    if (rng.bounded(2) == 0) b.alpn({"h2", "http/1.1"});
    if (rng.bounded(3) == 0) {
      Bytes key(16 + rng.bounded(32));
      for (auto& v : key) v = static_cast<uint8_t>(rng.bounded(256));
      b.key_share(0x001d, std::move(key));
    }
    if (rng.bounded(3) == 0) b.padding(rng.bounded(40));
  }

  if (opts.allow_bare && rng.bounded(4) == 0) {
    b.framed(false);
  }
  return b.raw(std::move(source_id));
}

}  // namespace hellogram::testutil
