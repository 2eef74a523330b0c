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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hellogram/errors.hpp"
#include "hellogram/eval.hpp"
#include "hellogram/infer.hpp"
#include "hellogram/ingest.hpp"
#include "hellogram/ja3.hpp"
#include "hellogram/pum.hpp"
#include "hellogram/stunt.hpp"
#include "hellogram/wire.hpp"

namespace {

using namespace hellogram;

namespace fs = std::filesystem;

uint64_t env_seed() {
  if (const char* v = std::getenv("HELLOGRAM_SEED")) {
    return std::strtoull(v, nullptr, 10);
  }
  return 0;
}

bool looks_like_pcap(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  uint8_t magic[4] = {};
  in.read(reinterpret_cast<char*>(magic), 4);
  if (!in) return false;
  uint32_t v;
  std::memcpy(&v, magic, 4);
  return v == 0xa1b2c3d4u || v == 0xd4c3b2a1u || v == 0xa1b23c4du || v == 0x4d3cb2a1u;
}

ingest::CorpusFile read_corpus(const fs::path& path, const std::string& informat) {
  if (informat == "pcap" || (informat == "auto" && looks_like_pcap(path))) {
    return ingest::read_pcap(path);
  }
  return ingest::read_hexline(path);
}

ja3::LabelRepository load_repos_or_die(const std::vector<std::string>& repo_paths) {
  std::vector<fs::path> paths(repo_paths.begin(), repo_paths.end());
  auto loaded = ja3::load_repositories(paths);
  for (const std::string& warning : loaded.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return std::move(loaded.repo);
}

/// Sorted hexline files of a splits directory.
std::vector<fs::path> split_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::ostream& open_out(std::optional<std::ofstream>& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.emplace(path, std::ios::binary);
  if (!*file) {
    raise(Errc::IoError, "cannot write " + path);
  }
  return *file;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// ---------------------------------------------------------------------------

int cmd_convert(const std::string& in, const std::string& informat, const std::string& out) {
  const ingest::CorpusFile corpus = read_corpus(in, informat);
  ingest::write_hexline(corpus, out);
  std::cerr << "converted " << corpus.entries.size() << " hellos, skipped "
            << corpus.skips.size() << "\n";
  for (const auto& skip : corpus.skips) {
    std::cerr << "  skip " << skip.where << ": " << skip.reason << "\n";
  }
  return 0;
}

int cmd_label(const std::string& in, const std::vector<std::string>& repos,
              const std::string& out) {
  const ja3::LabelRepository repo = load_repos_or_die(repos);
  ingest::CorpusFile corpus = ingest::read_hexline(in);
  size_t unknown = 0;
  for (auto& entry : corpus.entries) {
    entry.label = ja3::label(wire::parse_client_hello(entry.raw), repo);
    if (entry.label == ja3::kUnknownLabel) ++unknown;
  }
  ingest::write_hexline(corpus, out);
  const size_t total = corpus.entries.size();
  std::cerr << "labeled " << total << " hellos, " << unknown << " Unknown ("
            << (total ? 100.0 * static_cast<double>(unknown) / static_cast<double>(total) : 0.0)
            << "%)\n";
  return 0;
}

int cmd_train(const std::string& in, double delta, const std::string& byte_mode,
              const std::string& out) {
  const ja3::ByteMode mode = ja3::byte_mode_from_name(byte_mode);
  const ingest::CorpusFile corpus = ingest::read_hexline(in);

  std::vector<wire::FeatureBytes> features;
  features.reserve(corpus.entries.size());
  for (const auto& entry : corpus.entries) {
    wire::FeatureBytes fb = ja3::extract_features(wire::parse_client_hello(entry.raw), mode);
    fb.label = entry.label;
    features.push_back(std::move(fb));
  }

  pum::ModelSet set = pum::build_models(features, delta, mode);
  set.save(out);

  std::cerr << "trained " << set.size() << " models (skipped "
            << set.last_build_stats.skipped_unlabeled << " unlabeled/Unknown, collapsed "
            << set.last_build_stats.duplicates_collapsed << " duplicates)\n";
  for (const auto& [label, entry] : set.entries()) {
    std::cerr << "  " << label << ": m=" << entry.counts.rows()
              << " unique=" << entry.counts.sequences() << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& in, bool scores,
                std::optional<double> min_score, const std::string& out_path) {
  const pum::ModelSet set = pum::ModelSet::load(model_path);
  const ingest::CorpusFile corpus = ingest::read_hexline(in);

  std::optional<std::ofstream> file;
  std::ostream& os = open_out(file, out_path);

  os << "source_id,label,score";
  if (scores) {
    for (const auto& [label, entry] : set.entries()) os << ',' << csv_field(label);
  }
  os << '\n';

  infer::PredictOptions opts;
  opts.want_scores = scores;
  for (const auto& entry : corpus.entries) {
    wire::FeatureBytes fb =
        ja3::extract_features(wire::parse_client_hello(entry.raw), set.byte_mode());
    const infer::Prediction pred = infer::predict(set, fb, opts);
    const bool rejected = min_score && pred.score < *min_score;
    os << csv_field(entry.raw.source_id) << ','
       << csv_field(rejected ? ja3::kUnknownLabel : pred.label) << ','
       << eval::format_double(pred.score);
    if (scores) {
      for (const auto& [label, unused] : set.entries()) {
        os << ',' << eval::format_double(pred.per_label_scores->at(label));
      }
    }
    os << '\n';
  }
  return 0;
}

int cmd_update(const std::string& model_path, const std::string& in,
               const std::vector<std::string>& repos) {
  const ja3::LabelRepository repo = load_repos_or_die(repos);
  pum::ModelSet set = pum::ModelSet::load(model_path);
  const ingest::CorpusFile corpus = ingest::read_hexline(in);

  std::map<std::string, size_t> added;
  size_t unknown = 0, duplicates = 0, new_labels = 0;
  for (const auto& entry : corpus.entries) {
    const pum::UpdateOutcome outcome = set.update(entry.raw, repo);
    switch (outcome.status) {
      case pum::UpdateOutcome::Status::Added:
        ++added[outcome.label];
        break;
      case pum::UpdateOutcome::Status::NewLabel:
        ++added[outcome.label];
        ++new_labels;
        break;
      case pum::UpdateOutcome::Status::DuplicateSkipped:
        ++duplicates;
        break;
      case pum::UpdateOutcome::Status::UnknownSkipped:
        ++unknown;
        break;
    }
  }
  set.save(model_path);

  std::cerr << "updated " << model_path << ": " << new_labels << " new labels, " << duplicates
            << " duplicates skipped, " << unknown << " Unknown skipped\n";
  for (const auto& [label, n] : added) {
    std::cerr << "  " << label << ": +" << n << "\n";
  }
  return 0;
}

int cmd_stunt(const std::string& in, const std::string& kind, double fraction,
              const std::string& grease, uint64_t seed, const std::string& out) {
  stunt::PerturbationSpec spec;
  spec.kind = kind == "ordered" ? stunt::Kind::OrderedSwap : stunt::Kind::RandomFraction;
  spec.fraction = fraction;
  spec.grease_mode =
      grease == "exclude" ? stunt::GreaseMode::ExcludeFromSwap : stunt::GreaseMode::Include;
  spec.rng_seed = seed;

  ingest::CorpusFile corpus = ingest::read_hexline(in);
  Rng rng(seed);
  size_t passthrough = 0;
  for (auto& entry : corpus.entries) {
    const auto applied = stunt::apply(spec, wire::parse_client_hello(entry.raw), rng);
    if (!applied.modified) ++passthrough;
    entry.raw = stunt::reserialize(applied.hello);
  }
  ingest::write_hexline(corpus, out);
  std::cerr << "perturbed " << (corpus.entries.size() - passthrough) << " hellos, passed through "
            << passthrough << "\n";
  return 0;
}

int cmd_experiment(const std::string& splits_dir, const std::vector<std::string>& repos,
                   const std::string& method, const std::string& byte_mode,
                   const std::string& kind, std::vector<double> fractions,
                   const std::string& grease, int trials, uint64_t seed, int jobs, double delta,
                   const std::string& out_path, const std::string& summary_path,
                   const std::vector<std::string>& keywords, const std::string& keyword_path,
                   const std::string& corpus_report_path) {
  const ja3::LabelRepository repo = load_repos_or_die(repos);

  std::vector<ingest::CorpusFile> split_corpora;
  std::vector<std::string> names;
  for (const fs::path& file : split_files(splits_dir)) {
    split_corpora.push_back(ingest::read_hexline(file));
    names.push_back(file.filename().string());
  }
  if (split_corpora.size() < 2) {
    raise(Errc::InsufficientSplits,
          splits_dir + " holds " + std::to_string(split_corpora.size()) + " split files");
  }
  eval::SplitCorpus corpus = eval::SplitCorpus::prepare(split_corpora, repo, names);

  if (!corpus_report_path.empty()) {
    std::ofstream crs(corpus_report_path, std::ios::binary);
    eval::write_corpus_report_csv(crs, corpus.accounting());
  }

  eval::ExperimentConfig config;
  config.method = method == "ja3" ? eval::Method::Ja3 : eval::Method::MaxLikelihood;
  config.byte_mode = ja3::byte_mode_from_name(byte_mode);
  config.trials = trials;
  config.seed = seed;
  config.jobs = jobs;
  config.delta = delta;

  std::vector<eval::ExperimentConfig> grid;
  if (kind == "none") {
    grid.push_back(config);
  } else if (kind == "ordered") {
    config.perturbation = stunt::PerturbationSpec{
        stunt::Kind::OrderedSwap, 0.0,
        grease == "exclude" ? stunt::GreaseMode::ExcludeFromSwap : stunt::GreaseMode::Include,
        seed};
    grid.push_back(config);
  } else {
    if (fractions.empty()) {
      for (int i = 1; i <= 10; ++i) fractions.push_back(0.1 * i);
    }
    for (double f : fractions) {
      config.perturbation =
          stunt::PerturbationSpec{stunt::Kind::RandomFraction, f, stunt::GreaseMode::Include, seed};
      grid.push_back(config);
    }
  }

  std::ofstream trials_file(out_path, std::ios::binary);
  if (!trials_file) {
    raise(Errc::IoError, "cannot write " + out_path);
  }
  eval::write_trials_csv_header(trials_file);

  std::optional<std::ofstream> summary_file;
  std::ostream& summary_os = open_out(summary_file, summary_path);
  eval::write_summary_csv_header(summary_os);

  std::optional<std::ofstream> keyword_file;
  std::ostream* keyword_os = nullptr;
  if (!keywords.empty()) {
    keyword_os = &open_out(keyword_file, keyword_path);
    eval::write_keyword_csv_header(*keyword_os);
  }

  for (const eval::ExperimentConfig& point : grid) {
    const eval::EvalReport report = eval::run_experiment(corpus, point, repo);
    eval::append_trials_csv(trials_file, report);
    eval::append_summary_csv(summary_os, report);
    if (keyword_os) {
      for (const std::string& kw : keywords) {
        eval::append_keyword_csv(*keyword_os, report, eval::keyword_score(report, kw));
      }
    }
    std::cerr << "ran " << eval::method_name(point.method) << "/" << byte_mode << " kind=" << kind;
    if (point.perturbation && point.perturbation->kind == stunt::Kind::RandomFraction) {
      std::cerr << " fraction=" << point.perturbation->fraction;
    }
    std::cerr << ": mean f1 " << report.unbiased_f1_mean << " +/- " << report.ci_halfwidth
              << " (" << report.trial_scores.size() << " trials, " << report.overlap_dropped
              << " overlap-dropped)\n";
  }
  return 0;
}

int cmd_synth(size_t classes, size_t samples, uint64_t seed, const std::string& out,
              const std::string& repo_out, size_t splits, const std::string& splits_dir) {
  const ingest::SyntheticSpec spec = ingest::default_synthetic_spec(classes, samples, seed);
  const ingest::SyntheticResult result = ingest::generate_synthetic(spec, seed);

  if (!out.empty()) {
    ingest::write_hexline(result.corpus, out);
  }
  if (!repo_out.empty()) {
    std::ofstream rf(repo_out, std::ios::binary);
    if (!rf) {
      raise(Errc::IoError, "cannot write " + repo_out);
    }
    std::vector<std::pair<std::string, std::string>> entries(result.repo.entries().begin(),
                                                             result.repo.entries().end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [hash, label] : entries) rf << hash << '\t' << label << '\n';
  }
  if (splits > 0) {
    fs::create_directories(splits_dir);
    const auto parts = ingest::split_corpus(result.corpus, splits, seed);
    for (size_t i = 0; i < parts.size(); ++i) {
      ingest::write_hexline(parts[i], fs::path(splits_dir) /
                                          ("split-" + std::to_string(i + 1) + ".hex"));
    }
  }
  std::cerr << "generated " << result.corpus.entries.size() << " hellos across " << classes
            << " classes, " << result.repo.size() << " repository hashes\n";
  return 0;
}

int cmd_report(const std::string& splits_dir, const std::vector<std::string>& repos,
               const std::string& out_path) {
  const ja3::LabelRepository repo = load_repos_or_die(repos);
  std::vector<ingest::CorpusFile> split_corpora;
  std::vector<std::string> names;
  for (const fs::path& file : split_files(splits_dir)) {
    split_corpora.push_back(ingest::read_hexline(file));
    names.push_back(file.filename().string());
  }
  std::optional<std::ofstream> file;
  std::ostream& os = open_out(file, out_path);
  eval::write_corpus_report_csv(os, eval::corpus_report(split_corpora, repo, names));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TLS client fingerprinting with positional byte models"};
  app.require_subcommand(1);

  // convert
  std::string conv_in, conv_informat = "auto", conv_out;
  auto* convert = app.add_subcommand("convert", "convert pcap or hexline corpora to hexline");
  convert->add_option("--in", conv_in, "input file (pcap or hexline)")->required();
  convert->add_option("--informat", conv_informat, "input format")
      ->check(CLI::IsMember({"auto", "pcap", "hexline"}));
  convert->add_option("--out", conv_out, "output hexline file")->required();

  // label
  std::string label_in, label_out;
  std::vector<std::string> label_repos;
  auto* label = app.add_subcommand("label", "attach JA3 repository labels to a corpus");
  label->add_option("--in", label_in, "input hexline file")->required();
  label->add_option("--repo", label_repos, "repository file (repeatable, first wins)")
      ->required();
  label->add_option("--out", label_out, "output labeled hexline file")->required();

  // train
  std::string train_in, train_out, train_mode = "all";
  double train_delta = pum::kDefaultDelta;
  auto* train = app.add_subcommand("train", "build models from a labeled corpus");
  train->add_option("--in", train_in, "labeled hexline file")->required();
  train->add_option("--delta", train_delta, "additive smoothing constant")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  train->add_option("--byte-mode", train_mode, "which bytes feed the models")
      ->check(CLI::IsMember({"all", "ja3"}));
  train->add_option("--out", train_out, "model file to write")->required();

  // predict
  std::string pred_model, pred_in, pred_out;
  bool pred_scores = false;
  std::optional<double> pred_min_score;
  auto* predict = app.add_subcommand("predict", "classify hellos with a model file");
  predict->add_option("--model", pred_model, "model file")->required();
  predict->add_option("--in", pred_in, "input hexline file")->required();
  predict->add_flag("--scores", pred_scores, "emit one score column per model");
  predict->add_option("--min-score", pred_min_score,
                      "report Unknown when the best score is below this");
  predict->add_option("--out", pred_out, "output CSV (default stdout)");

  // update
  std::string upd_model, upd_in;
  std::vector<std::string> upd_repos;
  auto* update = app.add_subcommand("update", "absorb new hellos into a model file in place");
  update->add_option("--model", upd_model, "model file to update")->required();
  update->add_option("--in", upd_in, "input hexline file")->required();
  update->add_option("--repo", upd_repos, "repository file (repeatable)")->required();

  // stunt
  std::string stunt_in, stunt_out, stunt_kind, stunt_grease = "include";
  double stunt_fraction = 0.0;
  uint64_t stunt_seed = env_seed();
  auto* stunt_cmd = app.add_subcommand("stunt", "apply cipher-suite perturbations to a corpus");
  stunt_cmd->add_option("--in", stunt_in, "input hexline file")->required();
  stunt_cmd->add_option("--kind", stunt_kind, "perturbation kind")
      ->check(CLI::IsMember({"ordered", "fraction"}))
      ->required();
  stunt_cmd->add_option("--fraction", stunt_fraction, "fraction of the list to permute")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  stunt_cmd->add_option("--grease", stunt_grease, "may swaps involve GREASE values")
      ->check(CLI::IsMember({"include", "exclude"}));
  stunt_cmd->add_option("--seed", stunt_seed, "rng seed (default $HELLOGRAM_SEED or 0)");
  stunt_cmd->add_option("--out", stunt_out, "output hexline file")->required();

  // experiment
  std::string exp_splits, exp_method = "ml", exp_mode = "all", exp_kind = "none";
  std::string exp_grease = "include", exp_out, exp_summary, exp_keyword_out, exp_corpus_report;
  std::vector<std::string> exp_repos, exp_keywords;
  std::vector<double> exp_fractions;
  int exp_trials = -1, exp_jobs = 1;
  uint64_t exp_seed = env_seed();
  double exp_delta = pum::kDefaultDelta;
  auto* experiment = app.add_subcommand("experiment", "k-fold perturbation experiments");
  experiment->add_option("--splits", exp_splits, "directory of hexline split files")->required();
  experiment->add_option("--repo", exp_repos, "repository file (repeatable)")->required();
  experiment->add_option("--method", exp_method, "classifier under test")
      ->check(CLI::IsMember({"ja3", "ml"}));
  experiment->add_option("--byte-mode", exp_mode, "model input bytes (ml only)")
      ->check(CLI::IsMember({"all", "ja3"}));
  experiment->add_option("--kind", exp_kind, "perturbation kind")
      ->check(CLI::IsMember({"none", "ordered", "fraction"}));
  experiment->add_option("--fractions", exp_fractions,
                         "fraction grid (default 0.1..1.0 step 0.1)");
  experiment->add_option("--grease", exp_grease, "ordered swaps may involve GREASE values")
      ->check(CLI::IsMember({"include", "exclude"}));
  experiment->add_option("--trials", exp_trials,
                         "trials per fold (default: 30 ordered, 4 fraction, 1 none)");
  experiment->add_option("--seed", exp_seed, "rng seed (default $HELLOGRAM_SEED or 0)");
  experiment->add_option("--jobs", exp_jobs, "parallel trial workers")->check(CLI::Range(1, 256));
  experiment->add_option("--delta", exp_delta, "additive smoothing constant")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  experiment->add_option("--out", exp_out, "per-trial CSV")->required();
  experiment->add_option("--summary-out", exp_summary, "summary CSV (default stdout)");
  experiment->add_option("--keyword", exp_keywords, "label substring report (repeatable)");
  experiment->add_option("--keyword-out", exp_keyword_out, "keyword CSV (default stdout)");
  experiment->add_option("--corpus-report", exp_corpus_report, "per-split accounting CSV");

  // synth
  size_t synth_classes = 20, synth_samples = 2000, synth_splits = 0;
  uint64_t synth_seed = env_seed();
  std::string synth_out, synth_repo_out, synth_splits_dir = "splits";
  auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
  synth->add_option("--classes", synth_classes, "number of synthetic applications");
  synth->add_option("--samples", synth_samples, "total sample count");
  synth->add_option("--seed", synth_seed, "rng seed (default $HELLOGRAM_SEED or 0)");
  synth->add_option("--out", synth_out, "corpus hexline file");
  synth->add_option("--repo-out", synth_repo_out, "repository file for the corpus");
  synth->add_option("--splits", synth_splits, "also write this many split files");
  synth->add_option("--splits-dir", synth_splits_dir, "directory for split files");

  // report
  std::string report_splits, report_out;
  std::vector<std::string> report_repos;
  auto* report = app.add_subcommand("report", "per-split corpus accounting");
  report->add_option("--splits", report_splits, "directory of hexline split files")->required();
  report->add_option("--repo", report_repos, "repository file (repeatable)")->required();
  report->add_option("--out", report_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*convert) return cmd_convert(conv_in, conv_informat, conv_out);
    if (*label) return cmd_label(label_in, label_repos, label_out);
    if (*train) return cmd_train(train_in, train_delta, train_mode, train_out);
    if (*predict) return cmd_predict(pred_model, pred_in, pred_scores, pred_min_score, pred_out);
    if (*update) return cmd_update(upd_model, upd_in, upd_repos);
    if (*stunt_cmd) {
      if (stunt_kind == "fraction" && stunt_fraction == 0.0) {
        std::cerr << "error: --kind fraction requires --fraction\n";
        return 2;
      }
      return cmd_stunt(stunt_in, stunt_kind, stunt_fraction, stunt_grease, stunt_seed, stunt_out);
    }
    if (*experiment) {
      if (exp_trials < 0) {
        exp_trials = exp_kind == "ordered" ? 30 : exp_kind == "fraction" ? 4 : 1;
      }
      return cmd_experiment(exp_splits, exp_repos, exp_method, exp_mode, exp_kind, exp_fractions,
                            exp_grease, exp_trials, exp_seed, exp_jobs, exp_delta, exp_out,
                            exp_summary, exp_keywords, exp_keyword_out, exp_corpus_report);
    }
    if (*synth) {
      return cmd_synth(synth_classes, synth_samples, synth_seed, synth_out, synth_repo_out,
                       synth_splits, synth_splits_dir);
    }
    if (*report) return cmd_report(report_splits, report_repos, report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
