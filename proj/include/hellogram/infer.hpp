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
#include <string>
#include <vector>

#include "hellogram/pum.hpp"
#include "hellogram/wire.hpp"

namespace hellogram::infer {

struct Prediction {
  std::string label;
  double score = 0.0;  // mean log-likelihood, nats per byte
  std::optional<std::map<std::string, double>> per_label_scores;
};

/// Counters for the scoring-cost contract: the kernels bump cells_read once
/// per probability cell actually loaded.
struct PredictStats {
  uint64_t cells_read = 0;
  uint64_t models_scored = 0;
};

struct PredictOptions {
  bool want_scores = false;
  PredictStats* stats = nullptr;
};

/// (1/K) * sum of log p_i(x_i) over the first K = min(|x|, model rows)
/// positions. Natural log.
double mean_log_likelihood(const pum::PumModel& model, const wire::FeatureBytes& x,
                           PredictStats* stats = nullptr);

/// Argmax of mean_log_likelihood over every model in the set; exact score
/// ties go to the lexicographically smallest label.
Prediction predict(const pum::ModelSet& set, const wire::FeatureBytes& x,
                   const PredictOptions& opts = {});

struct BatchItem {
  std::optional<Prediction> prediction;
  std::string error;  // set when this element failed
};

/// Element-wise predict; failures are carried per element instead of
/// aborting the batch.
std::vector<BatchItem> predict_batch(const pum::ModelSet& set,
                                     const std::vector<wire::FeatureBytes>& xs,
                                     const PredictOptions& opts = {});

}  // namespace hellogram::infer
