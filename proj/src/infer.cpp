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

#include "hellogram/infer.hpp"

#include "hellogram/errors.hpp"
#include "hellogram/kernels.hpp"

namespace hellogram::infer {

double mean_log_likelihood(const pum::PumModel& model, const wire::FeatureBytes& x,
                           PredictStats* stats) {
  if (x.bytes.empty()) {
    raise(Errc::EmptyInput, "cannot score an empty byte sequence (" + x.source_id + ")");
  }
  if (model.rows == 0) {
    raise(Errc::EmptyInput, "model '" + model.label + "' has no rows");
  }
  const size_t k = std::min(x.bytes.size(), model.rows);
  uint64_t* loads = stats ? &stats->cells_read : nullptr;
  const double sum =
      kernels::active().sum_log_gather(model.log_probs.data(), x.bytes.data(), k, loads);
  return sum / static_cast<double>(k);
}

Prediction predict(const pum::ModelSet& set, const wire::FeatureBytes& x,
                   const PredictOptions& opts) {
  if (set.empty()) {
    raise(Errc::NoModels, "model set is empty");
  }

  Prediction out;
  if (opts.want_scores) out.per_label_scores.emplace();

  bool first = true;
  double best = 0.0;
  // entries() iterates labels in lexicographic order, so keeping only
  // strictly greater scores lands ties on the smallest label.
  for (const auto& [label, entry] : set.entries()) {
    const double score = mean_log_likelihood(entry.model, x, opts.stats);
    if (opts.stats) ++opts.stats->models_scored;
    if (first || score > best) {
      best = score;
      out.label = label;
      first = false;
    }
    if (out.per_label_scores) (*out.per_label_scores)[label] = score;
  }
  out.score = best;
  return out;
}

std::vector<BatchItem> predict_batch(const pum::ModelSet& set,
                                     const std::vector<wire::FeatureBytes>& xs,
                                     const PredictOptions& opts) {
  std::vector<BatchItem> out;
  out.reserve(xs.size());
  for (const wire::FeatureBytes& x : xs) {
    BatchItem item;
    try {
      item.prediction = predict(set, x, opts);
    } catch (const Error& e) {
      item.error = e.what();
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace hellogram::infer
