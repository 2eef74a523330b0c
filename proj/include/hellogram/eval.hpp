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
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hellogram/ingest.hpp"
#include "hellogram/ja3.hpp"
#include "hellogram/md5.hpp"
#include "hellogram/pum.hpp"
#include "hellogram/stunt.hpp"
#include "hellogram/wire.hpp"

namespace hellogram::eval {

/// One-vs-rest f1 for `cls`; 0 when precision + recall is 0.
double f1_per_class(std::span<const std::string> truth, std::span<const std::string> pred,
                    const std::string& cls);

/// Unweighted mean of per-class f1 over `classes` (macro averaging), so
/// small classes count as much as dominant ones.
double unbiased_f1(std::span<const std::string> truth, std::span<const std::string> pred,
                   const std::vector<std::string>& classes);

/// The JA3 field values rendered as bytes; the model input in ja3 byte mode.
wire::FeatureBytes extract_ja3_bytes(const wire::ParsedClientHello& parsed);

enum class Method { Ja3, MaxLikelihood };

const char* method_name(Method m);

struct ExperimentConfig {
  Method method = Method::MaxLikelihood;
  ja3::ByteMode byte_mode = ja3::ByteMode::AllBytes;
  std::optional<stunt::PerturbationSpec> perturbation;
  int trials = 1;
  double confidence = 0.95;
  double delta = pum::kDefaultDelta;
  uint64_t seed = 0;
  int jobs = 1;
};

struct TrialScore {
  size_t fold = 0;
  int trial = 0;
  double unbiased_f1 = 0.0;
};

struct EvalReport {
  ExperimentConfig config;
  std::vector<TrialScore> trial_scores;  // (fold, trial) order, deterministic
  double unbiased_f1_mean = 0.0;
  double ci_halfwidth = 0.0;  // two-sided Student-t at config.confidence
  std::map<std::string, double> per_class_f1;  // mean over the trials that scored the class

  size_t validation_samples = 0;   // eligible per fold, summed
  size_t overlap_dropped = 0;      // validation samples byte-identical to training
  size_t passthrough_short = 0;    // hellos left unperturbed (list too short / no eligible pair)
};

/// Per-split sample accounting in corpus order.
struct SplitAccounting {
  std::string name;
  size_t total = 0;            // parseable ClientHellos
  size_t without_unknown = 0;  // minus samples whose JA3 hash is unlabeled
  size_t unique = 0;           // minus scrub-identical duplicates
};

/// Splits preprocessed for cross-validation: JA3 quasi-labels resolved,
/// Unknown dropped, per-split scrub-identity dedupe. Fold models are built
/// lazily per byte mode and reused across every experiment on this corpus.
class SplitCorpus {
public:
  struct Sample {
    wire::RawClientHello raw;
    wire::ParsedClientHello parsed;
    std::string truth;
    Md5::Digest scrub_digest;  // all-bytes scrub identity
  };

  static SplitCorpus prepare(const std::vector<ingest::CorpusFile>& splits,
                             const ja3::LabelRepository& repo,
                             std::vector<std::string> split_names = {});

  size_t fold_count() const { return splits_.size(); }
  const std::vector<Sample>& split(size_t i) const { return splits_[i]; }
  const std::vector<SplitAccounting>& accounting() const { return accounting_; }

  /// Training models for a fold: every split but `fold`, deduped by model
  /// input bytes. Cached per (fold, mode, delta).
  const pum::ModelSet& fold_models(size_t fold, ja3::ByteMode mode, double delta);

  /// Validation samples for a fold with training-set byte duplicates
  /// removed, so no scored sequence was ever trained on.
  const std::vector<const Sample*>& fold_validation(size_t fold);
  size_t fold_overlap_dropped(size_t fold);

private:
  struct FoldCache {
    std::map<std::pair<int, double>, pum::ModelSet> models;  // (mode, delta) -> set
    std::optional<std::vector<const Sample*>> validation;
    size_t overlap_dropped = 0;
  };

  std::vector<std::vector<Sample>> splits_;
  std::vector<SplitAccounting> accounting_;
  std::vector<FoldCache> folds_;
  std::vector<std::unordered_set<Md5::Digest, pum::DigestHash>> split_digests_;
};

/// k-fold protocol: for every fold, train on the other splits, perturb the
/// validation hellos per config, classify, and score macro f1 over the
/// classes present in the fold's validation truth. Mean and confidence
/// half-width aggregate across folds x trials.
EvalReport run_experiment(SplitCorpus& corpus, const ExperimentConfig& config,
                          const ja3::LabelRepository& repo);

std::vector<SplitAccounting> corpus_report(const std::vector<ingest::CorpusFile>& splits,
                                           const ja3::LabelRepository& repo,
                                           std::vector<std::string> split_names = {});

/// Mean per-class f1 over classes whose label contains `keyword`
/// (case-insensitive).
struct KeywordScore {
  std::string keyword;
  double mean_f1 = 0.0;
  size_t classes_matched = 0;
};

KeywordScore keyword_score(const EvalReport& report, const std::string& keyword);

// CSV emission. All numbers use '.' decimals regardless of locale.
std::string format_double(double value);

void write_trials_csv_header(std::ostream& os);
void append_trials_csv(std::ostream& os, const EvalReport& report);
void write_summary_csv_header(std::ostream& os);
void append_summary_csv(std::ostream& os, const EvalReport& report);
void write_corpus_report_csv(std::ostream& os, const std::vector<SplitAccounting>& accounting);
void write_keyword_csv_header(std::ostream& os);
void append_keyword_csv(std::ostream& os, const EvalReport& report, const KeywordScore& score);

}  // namespace hellogram::eval
