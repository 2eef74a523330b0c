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
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "hellogram/wire.hpp"

namespace hellogram::ja3 {

/// Label for fingerprints absent from every repository.
inline const std::string kUnknownLabel = "Unknown";

/// GREASE code points (RFC 8701). JA3 drops these wherever they appear so a
/// client randomizing them keeps a single fingerprint.
inline constexpr std::array<uint16_t, 16> kGreaseValues = {
    0x0a0a, 0x1a1a, 0x2a2a, 0x3a3a, 0x4a4a, 0x5a5a, 0x6a6a, 0x7a7a,
    0x8a8a, 0x9a9a, 0xaaaa, 0xbaba, 0xcaca, 0xdada, 0xeaea, 0xfafa};

constexpr bool is_grease(uint16_t value) {
  return (value & 0x0f0f) == 0x0a0a && (value >> 8) == (value & 0xff);
}

/// The five JA3 field value lists after GREASE filtering, in fingerprint
/// order. Shared by the decimal-string rendering and the byte-mode feature
/// extraction so both views agree.
struct Ja3Fields {
  uint16_t version = 0;
  std::vector<uint16_t> ciphers;
  std::vector<uint16_t> extensions;      // wire order
  std::vector<uint16_t> curves;          // supported_groups body
  std::vector<uint8_t> point_formats;    // ec_point_formats body
};

Ja3Fields ja3_fields(const wire::ParsedClientHello& parsed);

/// "771,4865-4866,0-10-11,29-23,0" style decimal string; absent fields stay
/// empty between the commas.
std::string ja3_string(const wire::ParsedClientHello& parsed);

/// Lowercase hex MD5 of the decimal string.
std::string ja3_hash(const std::string& decimal_string);

struct Ja3Record {
  std::string decimal_string;
  std::string hash;
  std::string label;  // empty when no repository was consulted
};

/// hash -> application label map assembled from repository files.
class LabelRepository {
public:
  /// Returns the label for a hash, or "Unknown". Lookup is case-insensitive.
  const std::string& lookup(const std::string& hash) const;

  /// Inserts an entry; returns false (keeping the existing label) when the
  /// hash is already present.
  bool insert(const std::string& hash, const std::string& label);

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::unordered_map<std::string, std::string>& entries() const { return entries_; }

private:
  std::unordered_map<std::string, std::string> entries_;
};

struct RepositoryLoad {
  LabelRepository repo;
  std::vector<std::string> warnings;  // collision notes, one per shadowed entry
};

/// One file: `<32-hex-hash><TAB><label>` per line, `#` comments ignored.
RepositoryLoad load_repository(const std::filesystem::path& path);

/// Files merged in argument order; on hash collision the first wins and a
/// warning is recorded.
RepositoryLoad load_repositories(const std::vector<std::filesystem::path>& paths);

std::string label(const wire::ParsedClientHello& parsed, const LabelRepository& repo);

Ja3Record make_record(const wire::ParsedClientHello& parsed, const LabelRepository& repo);

/// Byte-mode feature view: the JA3 field values as a flat octet sequence
/// (16-bit codes high byte first), replacing the all-bytes scrub when models
/// are built from JA3 fields only.
wire::FeatureBytes ja3_feature_bytes(const wire::ParsedClientHello& parsed);

/// Which octets of a ClientHello feed the models.
enum class ByteMode { AllBytes, Ja3Bytes };

wire::FeatureBytes extract_features(const wire::ParsedClientHello& parsed, ByteMode mode);

const char* byte_mode_name(ByteMode mode);
ByteMode byte_mode_from_name(const std::string& name);

}  // namespace hellogram::ja3
