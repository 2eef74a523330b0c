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

#include "hellogram/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "hellogram/errors.hpp"
#include "hellogram/infer.hpp"
#include "hellogram/rng.hpp"

namespace hellogram::eval {

double f1_per_class(std::span<const std::string> truth, std::span<const std::string> pred,
                    const std::string& cls) {
  if (truth.size() != pred.size()) {
    raise(Errc::LengthMismatch, "truth has " + std::to_string(truth.size()) + " labels, pred " +
                                    std::to_string(pred.size()));
  }
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const bool is_true = truth[i] == cls;
    const bool is_pred = pred[i] == cls;
    if (is_true && is_pred) ++tp;
    else if (!is_true && is_pred) ++fp;
    else if (is_true && !is_pred) ++fn;
  }
  const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double unbiased_f1(std::span<const std::string> truth, std::span<const std::string> pred,
                   const std::vector<std::string>& classes) {
  if (classes.empty()) {
    raise(Errc::EmptyClassSet, "no classes to average over");
  }
  double sum = 0.0;
  for (const std::string& cls : classes) {
    sum += f1_per_class(truth, pred, cls);
  }
  return sum / static_cast<double>(classes.size());
}

wire::FeatureBytes extract_ja3_bytes(const wire::ParsedClientHello& parsed) {
  return ja3::ja3_feature_bytes(parsed);
}

const char* method_name(Method m) { return m == Method::Ja3 ? "ja3" : "ml"; }

// ---------------------------------------------------------------------------
// SplitCorpus

SplitCorpus SplitCorpus::prepare(const std::vector<ingest::CorpusFile>& splits,
                                 const ja3::LabelRepository& repo,
                                 std::vector<std::string> split_names) {
  SplitCorpus out;
  for (size_t s = 0; s < splits.size(); ++s) {
    SplitAccounting acct;
    acct.name = s < split_names.size() ? split_names[s] : "split-" + std::to_string(s + 1);

    std::vector<Sample> samples;
    std::unordered_set<Md5::Digest, pum::DigestHash> seen;
    for (const ingest::Entry& entry : splits[s].entries) {
      Sample sample;
      sample.raw = entry.raw;
      sample.parsed = wire::parse_client_hello(entry.raw);
      ++acct.total;
      sample.truth = ja3::label(sample.parsed, repo);
      if (sample.truth == ja3::kUnknownLabel) continue;
      ++acct.without_unknown;
      // Scrub before dedupe: uniqueness is over feature bytes, not raw bytes.
      sample.scrub_digest = Md5::digest(wire::scrub(sample.parsed).bytes);
      if (!seen.insert(sample.scrub_digest).second) continue;
      ++acct.unique;
      samples.push_back(std::move(sample));
    }
    out.splits_.push_back(std::move(samples));
    out.split_digests_.push_back(std::move(seen));
    out.accounting_.push_back(std::move(acct));
  }
  out.folds_.resize(out.splits_.size());
  return out;
}

const pum::ModelSet& SplitCorpus::fold_models(size_t fold, ja3::ByteMode mode, double delta) {
  auto& cache = folds_[fold].models;
  const auto key = std::make_pair(static_cast<int>(mode), delta);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::vector<wire::FeatureBytes> corpus;
  for (size_t s = 0; s < splits_.size(); ++s) {
    if (s == fold) continue;
    for (const Sample& sample : splits_[s]) {
      wire::FeatureBytes features = ja3::extract_features(sample.parsed, mode);
      features.label = sample.truth;
      corpus.push_back(std::move(features));
    }
  }
  if (corpus.empty()) {
    raise(Errc::NoLabeledData, "fold " + std::to_string(fold) + " has no training data");
  }
  return cache.emplace(key, pum::build_models(corpus, delta, mode)).first->second;
}

const std::vector<const SplitCorpus::Sample*>& SplitCorpus::fold_validation(size_t fold) {
  FoldCache& cache = folds_[fold];
  if (!cache.validation) {
    cache.validation.emplace();
    for (const Sample& sample : splits_[fold]) {
      bool in_training = false;
      for (size_t s = 0; s < splits_.size() && !in_training; ++s) {
        if (s != fold && split_digests_[s].contains(sample.scrub_digest)) in_training = true;
      }
      if (in_training) {
        ++cache.overlap_dropped;
      } else {
        cache.validation->push_back(&sample);
      }
    }
  }
  return *cache.validation;
}

size_t SplitCorpus::fold_overlap_dropped(size_t fold) {
  (void)fold_validation(fold);
  return folds_[fold].overlap_dropped;
}

// ---------------------------------------------------------------------------
// run_experiment

namespace {

struct TrialResult {
  double unbiased_f1 = 0.0;
  std::map<std::string, double> per_class;
  size_t passthrough = 0;
};

TrialResult run_trial(const std::vector<const SplitCorpus::Sample*>& validation,
                      const ExperimentConfig& config, const ja3::LabelRepository& repo,
                      const pum::ModelSet* models, size_t fold, int trial) {
  Rng rng(derive_seed(config.seed, {fold, static_cast<uint64_t>(trial),
                                    config.perturbation
                                        ? static_cast<uint64_t>(config.perturbation->fraction * 1000)
                                        : 0}));
  std::vector<std::string> truth;
  std::vector<std::string> pred;
  truth.reserve(validation.size());
  pred.reserve(validation.size());

  TrialResult result;
  for (const SplitCorpus::Sample* sample : validation) {
    const wire::ParsedClientHello* hello = &sample->parsed;
    wire::ParsedClientHello perturbed;
    if (config.perturbation) {
      auto applied = stunt::apply(*config.perturbation, sample->parsed, rng);
      if (!applied.modified) ++result.passthrough;
      // Perturbed hellos travel as bytes so both classifiers see exactly
      // what would hit the wire.
      perturbed = wire::parse_client_hello(stunt::reserialize(applied.hello));
      hello = &perturbed;
    }

    if (config.method == Method::Ja3) {
      pred.push_back(ja3::label(*hello, repo));
    } else {
      wire::FeatureBytes features = ja3::extract_features(*hello, config.byte_mode);
      pred.push_back(infer::predict(*models, features).label);
    }
    truth.push_back(sample->truth);
  }

  if (truth.empty()) {
    raise(Errc::NoLabeledData, "fold " + std::to_string(fold) + " has no validation samples");
  }

  std::set<std::string> class_set(truth.begin(), truth.end());
  const std::vector<std::string> classes(class_set.begin(), class_set.end());
  for (const std::string& cls : classes) {
    result.per_class[cls] = f1_per_class(truth, pred, cls);
  }
  result.unbiased_f1 = unbiased_f1(truth, pred, classes);
  return result;
}

double t_quantile(double confidence, size_t n) {
  boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
  return boost::math::quantile(dist, 1.0 - (1.0 - confidence) / 2.0);
}

}  // namespace

EvalReport run_experiment(SplitCorpus& corpus, const ExperimentConfig& config,
                          const ja3::LabelRepository& repo) {
  if (corpus.fold_count() < 2) {
    raise(Errc::InsufficientSplits, "k-fold needs at least 2 splits, have " +
                                        std::to_string(corpus.fold_count()));
  }
  if (config.trials < 1) {
    raise(Errc::InvalidProfile, "trials must be >= 1");
  }

  EvalReport report;
  report.config = config;

  // Validation lists and (for ML) fold models materialize before the trial
  // loop so trials are read-only and can run on any number of workers.
  std::vector<const pum::ModelSet*> models(corpus.fold_count(), nullptr);
  std::vector<const std::vector<const SplitCorpus::Sample*>*> validations(corpus.fold_count());
  for (size_t fold = 0; fold < corpus.fold_count(); ++fold) {
    validations[fold] = &corpus.fold_validation(fold);
    report.overlap_dropped += corpus.fold_overlap_dropped(fold);
    report.validation_samples += validations[fold]->size();
    if (config.method == Method::MaxLikelihood) {
      models[fold] = &corpus.fold_models(fold, config.byte_mode, config.delta);
    }
  }

  struct Task {
    size_t fold;
    int trial;
  };
  std::vector<Task> tasks;
  for (size_t fold = 0; fold < corpus.fold_count(); ++fold) {
    for (int trial = 0; trial < config.trials; ++trial) tasks.push_back({fold, trial});
  }
  std::vector<TrialResult> results(tasks.size());

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < tasks.size(); ++i) {
      results[i] = run_trial(*validations[tasks[i].fold], config, repo, models[tasks[i].fold],
                             tasks[i].fold, tasks[i].trial);
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        results[i] = run_trial(*validations[tasks[i].fold], config, repo, models[tasks[i].fold],
                               tasks[i].fold, tasks[i].trial);
      }
    };
    std::vector<std::thread> pool;
    const size_t n_workers = std::min<size_t>(static_cast<size_t>(jobs), tasks.size());
    pool.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Reduce in (fold, trial) order: identical output for any worker count.
  std::map<std::string, std::pair<double, size_t>> class_sums;
  double sum = 0.0;
  for (size_t i = 0; i < tasks.size(); ++i) {
    report.trial_scores.push_back({tasks[i].fold, tasks[i].trial, results[i].unbiased_f1});
    report.passthrough_short += results[i].passthrough;
    sum += results[i].unbiased_f1;
    for (const auto& [cls, f1] : results[i].per_class) {
      auto& acc = class_sums[cls];
      acc.first += f1;
      ++acc.second;
    }
  }
  const size_t n = report.trial_scores.size();
  report.unbiased_f1_mean = sum / static_cast<double>(n);
  for (const auto& [cls, acc] : class_sums) {
    report.per_class_f1[cls] = acc.first / static_cast<double>(acc.second);
  }

  if (n > 1) {
    double sq = 0.0;
    for (const TrialScore& t : report.trial_scores) {
      const double d = t.unbiased_f1 - report.unbiased_f1_mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / static_cast<double>(n - 1));
    report.ci_halfwidth = sd == 0.0 ? 0.0
                                    : t_quantile(config.confidence, n) * sd /
                                          std::sqrt(static_cast<double>(n));
  }
  return report;
}

std::vector<SplitAccounting> corpus_report(const std::vector<ingest::CorpusFile>& splits,
                                           const ja3::LabelRepository& repo,
                                           std::vector<std::string> split_names) {
  return SplitCorpus::prepare(splits, repo, std::move(split_names)).accounting();
}

KeywordScore keyword_score(const EvalReport& report, const std::string& keyword) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  const std::string needle = lower(keyword);
  KeywordScore out;
  out.keyword = keyword;
  double sum = 0.0;
  for (const auto& [cls, f1] : report.per_class_f1) {
    if (lower(cls).find(needle) != std::string::npos) {
      sum += f1;
      ++out.classes_matched;
    }
  }
  if (out.classes_matched > 0) out.mean_f1 = sum / static_cast<double>(out.classes_matched);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string kind_name(const std::optional<stunt::PerturbationSpec>& spec) {
  if (!spec) return "none";
  return spec->kind == stunt::Kind::OrderedSwap ? "ordered" : "fraction";
}

std::string grease_name(const std::optional<stunt::PerturbationSpec>& spec) {
  if (!spec) return "-";
  return spec->grease_mode == stunt::GreaseMode::Include ? "include" : "exclude";
}

double config_fraction(const ExperimentConfig& config) {
  return config.perturbation && config.perturbation->kind == stunt::Kind::RandomFraction
             ? config.perturbation->fraction
             : 0.0;
}

}  // namespace

void write_trials_csv_header(std::ostream& os) {
  os << "method,byte_mode,kind,grease,fraction,fold,trial,unbiased_f1\n";
}

void append_trials_csv(std::ostream& os, const EvalReport& report) {
  const ExperimentConfig& c = report.config;
  for (const TrialScore& t : report.trial_scores) {
    os << method_name(c.method) << ',' << ja3::byte_mode_name(c.byte_mode) << ','
       << kind_name(c.perturbation) << ',' << grease_name(c.perturbation) << ','
       << format_double(config_fraction(c)) << ',' << t.fold << ',' << t.trial << ','
       << format_double(t.unbiased_f1) << '\n';
  }
}

void write_summary_csv_header(std::ostream& os) {
  os << "method,byte_mode,kind,grease,fraction,trials,mean_unbiased_f1,ci_halfwidth\n";
}

void append_summary_csv(std::ostream& os, const EvalReport& report) {
  const ExperimentConfig& c = report.config;
  os << method_name(c.method) << ',' << ja3::byte_mode_name(c.byte_mode) << ','
     << kind_name(c.perturbation) << ',' << grease_name(c.perturbation) << ','
     << format_double(config_fraction(c)) << ',' << report.trial_scores.size() << ','
     << format_double(report.unbiased_f1_mean) << ',' << format_double(report.ci_halfwidth)
     << '\n';
}

void write_corpus_report_csv(std::ostream& os, const std::vector<SplitAccounting>& accounting) {
  os << "split,total,without_unknown,unique\n";
  for (const SplitAccounting& a : accounting) {
    os << csv_quote(a.name) << ',' << a.total << ',' << a.without_unknown << ',' << a.unique
       << '\n';
  }
}

void write_keyword_csv_header(std::ostream& os) {
  os << "keyword,method,byte_mode,kind,fraction,mean_f1,classes_matched\n";
}

void append_keyword_csv(std::ostream& os, const EvalReport& report, const KeywordScore& score) {
  const ExperimentConfig& c = report.config;
  os << csv_quote(score.keyword) << ',' << method_name(c.method) << ','
     << ja3::byte_mode_name(c.byte_mode) << ',' << kind_name(c.perturbation) << ','
     << format_double(config_fraction(c)) << ',' << format_double(score.mean_f1) << ','
     << score.classes_matched << '\n';
}

}  // namespace hellogram::eval
