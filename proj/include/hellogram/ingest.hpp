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
#include <filesystem>
#include <string>
#include <vector>

#include "hellogram/ja3.hpp"
#include "hellogram/wire.hpp"

namespace hellogram::ingest {

enum class Format { HexLine, Pcap, Synthetic };

struct SkipRecord {
  std::string where;
  std::string reason;
};

struct Entry {
  wire::RawClientHello raw;
  std::string label;  // empty when unlabeled
};

/// A loaded corpus. Every entry parses as a ClientHello; records that did
/// not are in `skips`.
struct CorpusFile {
  std::vector<Entry> entries;
  Format format = Format::HexLine;
  std::vector<SkipRecord> skips;
};

/// One record per line: `<hex bytes>` or `<hex bytes><TAB><label>`, with
/// whitespace inside the hex ignored; `#` starts a comment line. Syntax
/// errors are fatal with a line number; lines that fail ClientHello parsing
/// become skip records.
CorpusFile read_hexline(const std::filesystem::path& path);

void write_hexline(const CorpusFile& corpus, const std::filesystem::path& path);

/// Classic pcap (microsecond or nanosecond magic, either byte order),
/// Ethernet (one optional 802.1Q tag) or raw-IP link layers. Emits one
/// entry per TCP segment carrying a complete ClientHello record; candidates
/// that do not parse (e.g. a ClientHello continuing in the next segment)
/// are skip-counted, never fatal.
CorpusFile read_pcap(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic corpus generation.

/// One synthetic application. GREASE code points appearing in `ciphers` or
/// `groups` mark slots whose value is re-drawn per sample from the 16 GREASE
/// values, which is what makes samples of a class byte-diverse while keeping
/// a stable JA3 fingerprint.
struct ClassProfile {
  std::string name;
  size_t samples = 0;
  uint16_t version = 0x0303;
  std::vector<uint16_t> ciphers;
  std::vector<uint16_t> groups;
  std::vector<uint16_t> sig_algs;
  std::vector<uint8_t> point_formats{0x00};
  std::vector<std::vector<std::string>> alpn_variants;  // empty: no ALPN extension
  std::vector<size_t> padding_variants;                 // empty: no padding extension
  bool grease_extension = false;
  bool sni = true;
  std::string sni_base = "example.com";
  bool session_ticket = false;
  bool extended_master_secret = true;
  bool renegotiation_info = false;
  bool status_request = false;
  bool signed_cert_timestamp = false;
  bool tls13 = true;   // adds psk modes, supported_versions and key_share
  bool random_session_id = false;
  uint64_t order_salt = 0;  // class-specific extension ordering
};

struct SyntheticSpec {
  std::vector<ClassProfile> classes;
};

struct SyntheticResult {
  CorpusFile corpus;                 // labels carry the class names
  ja3::LabelRepository repo;         // JA3 hash -> class name for every sample
};

/// Deterministic for a given (spec, seed): same inputs, byte-identical
/// corpus. The repository contains every JA3 hash the corpus produces.
SyntheticResult generate_synthetic(const SyntheticSpec& spec, uint64_t seed);

/// A ready-made spec: `n_classes` applications with distinct cipher lists,
/// class-specific extension layouts, and paper-style class imbalance (the
/// four largest classes hold ~75% of `total_samples`, the smallest ones get
/// 2 samples each).
SyntheticSpec default_synthetic_spec(size_t n_classes, size_t total_samples, uint64_t seed);

/// Deterministic shuffle + round-robin partition into k splits.
std::vector<CorpusFile> split_corpus(const CorpusFile& corpus, size_t k, uint64_t seed);

}  // namespace hellogram::ingest
