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

#include "hellogram/pum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hellogram/errors.hpp"
#include "hellogram/kernels.hpp"

namespace hellogram::pum {

namespace {

constexpr const char* kFormatName = "hellogram-pum";
constexpr int kFormatVersion = 1;

}  // namespace

void FrequencyMatrix::accumulate(const wire::FeatureBytes& x) {
  if (!x.label.empty() && x.label != label_) {
    raise(Errc::LabelMismatch,
          "sequence labeled '" + x.label + "' fed to model '" + label_ + "'");
  }
  if (x.bytes.size() > rows_) {
    increments_.resize(x.bytes.size() * 256, 0);
    rows_ = x.bytes.size();
  }
  for (size_t i = 0; i < x.bytes.size(); ++i) {
    ++increments_[i * 256 + x.bytes[i]];
  }
  ++n_sequences_;
}

bool FrequencyMatrix::absorb(const wire::FeatureBytes& x) {
  if (!seen_.insert(Md5::digest(x.bytes)).second) return false;
  accumulate(x);
  return true;
}

bool FrequencyMatrix::seen(const wire::FeatureBytes& x) const {
  return seen_.contains(Md5::digest(x.bytes));
}

void FrequencyMatrix::restore_row(size_t position, const std::vector<uint32_t>& row) {
  if (position >= rows_) {
    increments_.resize((position + 1) * 256, 0);
    rows_ = position + 1;
  }
  std::copy(row.begin(), row.end(), increments_.begin() + position * 256);
}

void FrequencyMatrix::restore_meta(uint64_t n_sequences,
                                   const std::vector<Md5::Digest>& digests) {
  n_sequences_ = n_sequences;
  seen_.insert(digests.begin(), digests.end());
}

void PumModel::rebuild_log_probs() {
  log_probs.resize(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) log_probs[i] = std::log(probs[i]);
}

PumModel normalize(const FrequencyMatrix& counts) {
  PumModel model;
  model.label = counts.label();
  model.rows = counts.rows();
  model.probs.resize(model.rows * 256);
  const auto& k = kernels::active();
  for (size_t row = 0; row < model.rows; ++row) {
    const uint32_t* in = counts.raw().data() + row * 256;
    // Row sum as an exact integer; delta enters once per cell.
    const uint64_t increments = k.row_sum_u32(in, 256);
    const double denom = static_cast<double>(increments) + 256.0 * counts.delta();
    k.row_smooth_scale(in, 256, counts.delta(), 1.0 / denom, model.probs.data() + row * 256);
  }
  model.rebuild_log_probs();
  return model;
}

ModelSet::ModelSet(double delta, ja3::ByteMode mode) : delta_(delta), byte_mode_(mode) {}

const PumModel* ModelSet::find(const std::string& label) const {
  auto it = entries_.find(label);
  return it == entries_.end() ? nullptr : &it->second.model;
}

bool ModelSet::absorb(const wire::FeatureBytes& x, bool renormalize) {
  auto it = entries_.find(x.label);
  if (it == entries_.end()) {
    it = entries_.emplace(x.label, Entry{FrequencyMatrix(x.label, delta_), PumModel{}}).first;
  }
  if (!it->second.counts.absorb(x)) return false;
  if (renormalize) it->second.model = normalize(it->second.counts);
  return true;
}

void ModelSet::renormalize_all() {
  for (auto& [label, entry] : entries_) {
    entry.model = normalize(entry.counts);
  }
}

UpdateOutcome ModelSet::update(const wire::RawClientHello& raw,
                               const ja3::LabelRepository& repo) {
  const wire::ParsedClientHello parsed = wire::parse_client_hello(raw);
  const std::string lbl = ja3::label(parsed, repo);
  if (lbl == ja3::kUnknownLabel) {
    return {UpdateOutcome::Status::UnknownSkipped, lbl};
  }
  wire::FeatureBytes features = ja3::extract_features(parsed, byte_mode_);
  features.label = lbl;
  const bool fresh = !entries_.contains(lbl);
  if (!absorb(features)) {
    return {UpdateOutcome::Status::DuplicateSkipped, lbl};
  }
  return {fresh ? UpdateOutcome::Status::NewLabel : UpdateOutcome::Status::Added, lbl};
}

void ModelSet::save(const std::filesystem::path& path) const {
  nlohmann::json doc;
  doc["format"] = kFormatName;
  doc["format_version"] = kFormatVersion;
  doc["delta"] = delta_;
  doc["byte_mode"] = ja3::byte_mode_name(byte_mode_);

  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [label, entry] : entries_) {
    nlohmann::json rows = nlohmann::json::array();
    for (size_t row = 0; row < entry.counts.rows(); ++row) {
      nlohmann::json cells = nlohmann::json::array();
      for (size_t b = 0; b < 256; ++b) cells.push_back(entry.counts.raw()[row * 256 + b]);
      rows.push_back(std::move(cells));
    }
    // Digest order is canonicalized so identical state saves identical bytes
    // regardless of insertion history.
    std::vector<std::string> digests;
    digests.reserve(entry.counts.registry().size());
    for (const auto& d : entry.counts.registry()) digests.push_back(Md5::hex(d));
    std::sort(digests.begin(), digests.end());

    nlohmann::json entry_doc;
    entry_doc["m"] = entry.counts.rows();
    entry_doc["n_sequences"] = entry.counts.sequences();
    entry_doc["rows"] = std::move(rows);
    entry_doc["seen"] = digests;
    labels[label] = std::move(entry_doc);
  }
  doc["labels"] = std::move(labels);

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(Errc::IoError, "cannot write model file " + path.string());
  }
  out << doc.dump(1, '\t') << '\n';
}

ModelSet ModelSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::IoError, "cannot open model file " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::CorruptModelFile, path.string() + ": " + e.what());
  }

  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatName) {
      raise(Errc::CorruptModelFile, path.string() + ": not a model file");
    }
    if (doc.value("format_version", -1) != kFormatVersion) {
      raise(Errc::SchemaVersionMismatch,
            path.string() + ": format_version " + doc["format_version"].dump());
    }
    ModelSet set(doc.at("delta").get<double>(),
                 ja3::byte_mode_from_name(doc.at("byte_mode").get<std::string>()));
    for (const auto& [label, entry_doc] : doc.at("labels").items()) {
      FrequencyMatrix counts(label, set.delta_);
      const auto& rows = entry_doc.at("rows");
      const size_t m = entry_doc.at("m").get<size_t>();
      if (m == 0 || rows.size() != m) {
        raise(Errc::CorruptModelFile,
              path.string() + ": label '" + label + "' has inconsistent row count");
      }
      for (size_t row = 0; row < rows.size(); ++row) {
        const auto cells = rows[row].get<std::vector<uint32_t>>();
        if (cells.size() != 256) {
          raise(Errc::CorruptModelFile,
                path.string() + ": label '" + label + "' row " + std::to_string(row) +
                    " has " + std::to_string(cells.size()) + " cells");
        }
        counts.restore_row(row, cells);
      }
      std::vector<Md5::Digest> digests;
      for (const auto& hex : entry_doc.at("seen")) {
        const Bytes raw_digest = wire::hex_to_bytes(hex.get<std::string>());
        if (raw_digest.size() != 16) {
          raise(Errc::CorruptModelFile, path.string() + ": bad digest under '" + label + "'");
        }
        Md5::Digest d;
        std::copy(raw_digest.begin(), raw_digest.end(), d.begin());
        digests.push_back(d);
      }
      counts.restore_meta(entry_doc.at("n_sequences").get<uint64_t>(), digests);
      PumModel model = normalize(counts);
      set.entries_.emplace(label, Entry{std::move(counts), std::move(model)});
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::CorruptModelFile, path.string() + ": " + e.what());
  }
}

ModelSet build_models(const std::vector<wire::FeatureBytes>& corpus, double delta,
                      ja3::ByteMode mode) {
  ModelSet set(delta, mode);
  BuildStats stats;
  stats.sequences_in = corpus.size();
  for (const wire::FeatureBytes& x : corpus) {
    if (x.label.empty() || x.label == ja3::kUnknownLabel) {
      ++stats.skipped_unlabeled;
      continue;
    }
    if (!set.absorb(x, /*renormalize=*/false)) ++stats.duplicates_collapsed;
  }
  if (set.empty()) {
    raise(Errc::EmptyCorpus, "no labeled sequences to build from");
  }
  set.renormalize_all();
  set.last_build_stats = stats;
  return set;
}

}  // namespace hellogram::pum
