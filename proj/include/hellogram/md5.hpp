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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace hellogram {

/// MD5 (RFC 1321). Used as a fingerprint digest and duplicate-registry key,
/// not for anything security-sensitive.
class Md5 {
public:
  using Digest = std::array<uint8_t, 16>;

  Md5();

  void update(std::span<const uint8_t> data);
  void update(std::string_view data);
  Digest finish();

  static Digest digest(std::span<const uint8_t> data);
  static Digest digest(std::string_view data);
  static std::string hex(const Digest& digest);

private:
  void process_block(const uint8_t* block);

  std::array<uint32_t, 4> state_;
  uint64_t total_bytes_ = 0;
  std::array<uint8_t, 64> buffer_{};
  size_t buffered_ = 0;
};

}  // namespace hellogram
