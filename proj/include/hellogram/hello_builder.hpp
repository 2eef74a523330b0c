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
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "hellogram/wire.hpp"

namespace hellogram {

/// Assembles well-formed ClientHello byte sequences. Drives the synthetic
/// corpus generator and the randomized parser tests.
class HelloBuilder {
public:
  HelloBuilder();

  HelloBuilder& version(uint16_t v);
  HelloBuilder& record_version(uint16_t v);
  HelloBuilder& framed(bool on);
  HelloBuilder& random(const std::array<uint8_t, 32>& bytes);
  HelloBuilder& random_fill(uint8_t value);
  HelloBuilder& session_id(Bytes bytes);
  HelloBuilder& ciphers(std::vector<uint16_t> suites);
  HelloBuilder& compressions(Bytes methods);

  /// Raw extension, appended in call order.
  HelloBuilder& extension(uint16_t type, Bytes body);
  /// No extensions block at all (pre-TLS1.2 style hello).
  HelloBuilder& no_extensions();

  // Typed helpers for the extensions the scrubber and JA3 care about.
  HelloBuilder& server_name(std::string_view host);
  HelloBuilder& supported_groups(std::initializer_list<uint16_t> groups);
  HelloBuilder& supported_groups(const std::vector<uint16_t>& groups);
  HelloBuilder& ec_point_formats(std::initializer_list<uint8_t> formats);
  HelloBuilder& alpn(std::initializer_list<std::string_view> protocols);
  HelloBuilder& alpn(const std::vector<std::string>& protocols);
  HelloBuilder& key_share(uint16_t group, Bytes key_exchange);
  HelloBuilder& supported_versions(std::initializer_list<uint16_t> versions);
  HelloBuilder& signature_algorithms(const std::vector<uint16_t>& schemes);
  HelloBuilder& padding(size_t n);

  Bytes build() const;
  wire::RawClientHello raw(std::string source_id = "builder") const;
  wire::ParsedClientHello parsed(std::string source_id = "builder") const;

private:
  uint16_t version_ = 0x0303;
  uint16_t record_version_ = 0x0301;
  bool framed_ = true;
  bool extensions_block_ = true;
  std::array<uint8_t, 32> random_{};
  Bytes session_id_;
  std::vector<uint16_t> ciphers_{0x1301, 0x1302};
  Bytes compressions_{0x00};
  std::vector<wire::Extension> extensions_;
};

}  // namespace hellogram
