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
#include <vector>

namespace hellogram {

using Bytes = std::vector<uint8_t>;

namespace wire {

// TLS constants used throughout the parser. RFC 8446 terminology.
inline constexpr uint8_t kRecordTypeHandshake = 0x16;
inline constexpr uint8_t kHandshakeTypeClientHello = 0x01;
inline constexpr uint16_t kExtServerName = 0x0000;
inline constexpr uint16_t kExtSupportedGroups = 0x000a;
inline constexpr uint16_t kExtEcPointFormats = 0x000b;
inline constexpr uint16_t kExtKeyShare = 0x0033;

/// One ClientHello as captured: bytes plus where they came from.
/// Bytes may start at the TLS record header (0x16 ...) or directly at the
/// handshake header (0x01 ...); the parser detects which.
struct RawClientHello {
  Bytes bytes;
  std::string source_id;
};

struct Extension {
  uint16_t type = 0;
  Bytes body;

  bool operator==(const Extension&) const = default;
};

/// Structured view of one ClientHello. Parsing is lossless:
/// serialize(parse_client_hello(x)) == x.bytes.
struct ParsedClientHello {
  uint16_t legacy_version = 0;
  std::array<uint8_t, 32> random{};
  Bytes session_id;                    // 0..32 octets
  std::vector<uint16_t> cipher_suites; // wire order
  Bytes compression_methods;           // wire order, one octet each
  std::vector<Extension> extensions;   // wire order

  bool framed = false;           // input carried the 5-octet record header
  uint16_t record_version = 0;   // record-layer version when framed
  bool has_extensions_block = false; // explicit extensions vector (possibly empty)
  std::string source_id;

  /// The 5-octet record header (only meaningful when framed).
  std::array<uint8_t, 5> record_header() const;
  /// The 4-octet handshake header (type + 24-bit body length).
  std::array<uint8_t, 4> handshake_header() const;
  /// Byte length of the handshake message body (everything after the
  /// handshake header), recomputed from the fields.
  size_t body_length() const;

  bool operator==(const ParsedClientHello&) const = default;
};

/// Scrubbed byte sequence used for model building and inference. Octets from
/// the random field, the session-ID value, the server_name extension, and
/// key_share key-exchange payloads never appear here.
struct FeatureBytes {
  Bytes bytes;
  std::string label;  // empty means unlabeled
  std::string source_id;
};

ParsedClientHello parse_client_hello(const RawClientHello& raw);

/// Exact inverse of parse_client_hello for unmodified inputs; recomputes all
/// length fields, so a ParsedClientHello edited in place (e.g. reordered
/// cipher suites) serializes consistently.
Bytes serialize(const ParsedClientHello& parsed);

FeatureBytes scrub(const ParsedClientHello& parsed);

/// Collapses duplicate byte sequences, keeping first-seen order. Identical
/// sequences carrying different labels are a LabelConflict error.
std::vector<FeatureBytes> dedupe(const std::vector<FeatureBytes>& corpus);

/// "16 03 01" -> {0x16, 0x03, 0x01}. Accepts only hex digits: strip
/// whitespace first. Errors: InvalidHexDigit, OddDigitCount.
Bytes hex_to_bytes(std::string_view hex);

std::string bytes_to_hex(std::span<const uint8_t> bytes);

}  // namespace wire
}  // namespace hellogram
