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
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hellogram/ja3.hpp"
#include "hellogram/md5.hpp"
#include "hellogram/wire.hpp"

namespace hellogram::pum {

inline constexpr double kDefaultDelta = 1e-8;

struct DigestHash {
  size_t operator()(const Md5::Digest& d) const {
    size_t out;
    static_assert(sizeof(out) <= sizeof(Md5::Digest));
    std::memcpy(&out, d.data(), sizeof(out));
    return out;
  }
};

/// Per-label frequency counts over byte positions. A cell's count is
/// increments + delta: raw integer increments are what get stored and
/// persisted, delta is applied on read, so online updates and round trips
/// stay exact.
class FrequencyMatrix {
public:
  FrequencyMatrix(std::string label, double delta)
      : label_(std::move(label)), delta_(delta) {}

  const std::string& label() const { return label_; }
  double delta() const { return delta_; }
  size_t rows() const { return rows_; }
  uint64_t sequences() const { return n_sequences_; }

  uint32_t increments(size_t position, uint8_t byte) const {
    return increments_[position * 256 + byte];
  }
  double count(size_t position, uint8_t byte) const {
    return static_cast<double>(increments(position, byte)) + delta_;
  }
  const std::vector<uint32_t>& raw() const { return increments_; }

  /// Unconditionally counts one sequence; grows the matrix when the
  /// sequence is longer than every one seen so far. Throws LabelMismatch
  /// when the sequence carries a different label.
  void accumulate(const wire::FeatureBytes& x);

  /// Duplicate-aware accumulate: returns false (and changes nothing) when
  /// this exact byte sequence was absorbed before.
  bool absorb(const wire::FeatureBytes& x);

  bool seen(const wire::FeatureBytes& x) const;

  const std::unordered_set<Md5::Digest, DigestHash>& registry() const { return seen_; }

  // Used by model-file loading, which replays persisted state directly.
  void restore_row(size_t position, const std::vector<uint32_t>& row);
  void restore_meta(uint64_t n_sequences, const std::vector<Md5::Digest>& digests);

private:
  std::string label_;
  double delta_;
  size_t rows_ = 0;
  uint64_t n_sequences_ = 0;
  std::vector<uint32_t> increments_;  // rows_ x 256, row-major
  std::unordered_set<Md5::Digest, DigestHash> seen_;
};

/// Normalized per-position categorical distributions for one label, plus the
/// log table inference reads. Rows sum to 1; smoothing keeps every entry
/// strictly positive.
struct PumModel {
  std::string label;
  size_t rows = 0;
  std::vector<double> probs;      // rows x 256, row-major
  std::vector<double> log_probs;  // natural log of probs

  double prob(size_t position, uint8_t byte) const { return probs[position * 256 + byte]; }

  /// Recomputes log_probs from probs (for tests that edit probs directly).
  void rebuild_log_probs();
};

PumModel normalize(const FrequencyMatrix& counts);

struct UpdateOutcome {
  enum class Status { Added, NewLabel, DuplicateSkipped, UnknownSkipped };
  Status status;
  std::string label;
};

struct BuildStats {
  size_t sequences_in = 0;
  size_t skipped_unlabeled = 0;
  size_t duplicates_collapsed = 0;
};

/// All per-label models sharing one smoothing constant. Reads are safe
/// concurrently; update() requires exclusive access to the set.
class ModelSet {
public:
  explicit ModelSet(double delta = kDefaultDelta, ja3::ByteMode mode = ja3::ByteMode::AllBytes);

  double delta() const { return delta_; }
  ja3::ByteMode byte_mode() const { return byte_mode_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  struct Entry {
    FrequencyMatrix counts;
    PumModel model;
  };

  /// Label-sorted, which fixes the deterministic tie-break order downstream.
  const std::map<std::string, Entry>& entries() const { return entries_; }

  const PumModel* find(const std::string& label) const;

  /// Absorbs one labeled sequence (creating the label's matrix on first
  /// sight) and renormalizes only that label. Returns false on duplicate.
  /// Batch callers pass renormalize = false and call renormalize_all() once.
  bool absorb(const wire::FeatureBytes& x, bool renormalize = true);

  void renormalize_all();

  /// JA3-labels the hello via the repository, then absorbs its features.
  /// Unknown hashes and duplicates leave the set unchanged.
  UpdateOutcome update(const wire::RawClientHello& raw, const ja3::LabelRepository& repo);

  void save(const std::filesystem::path& path) const;
  static ModelSet load(const std::filesystem::path& path);

  BuildStats last_build_stats;

private:
  double delta_;
  ja3::ByteMode byte_mode_;
  std::map<std::string, Entry> entries_;
};

/// Algorithm: partition by label, drop unlabeled/Unknown, dedupe per label,
/// count, normalize. Duplicate and skip tallies land in last_build_stats.
ModelSet build_models(const std::vector<wire::FeatureBytes>& corpus, double delta,
                      ja3::ByteMode mode = ja3::ByteMode::AllBytes);

}  // namespace hellogram::pum
