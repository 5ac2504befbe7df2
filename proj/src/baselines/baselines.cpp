/*
 * Copyright 2026 The PriorBoost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "baselines/baselines.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace priorboost::baselines {

metrics::MethodTag SelectBest(double gbdt_val_auc, double prior_val_auc) {
  Check(gbdt_val_auc >= 0.0 && gbdt_val_auc <= 1.0 && prior_val_auc >= 0.0 && prior_val_auc <= 1.0,
        ErrorCode::kInvalidArgument, "validation AUCs must lie in [0, 1]");
  return gbdt_val_auc >= prior_val_auc ? metrics::MethodTag::kGbdt : metrics::MethodTag::kPrior;
}

data::Dataset StackFeatures(const data::Dataset& dataset, const fusion::PriorScores& centered) {
  Check(centered.centered, ErrorCode::kFailedPrecondition, "stacked prior scores must be centered");
  Check(centered.class_labels == dataset.schema.class_labels, ErrorCode::kInvalidArgument,
        "prior class labels do not match the dataset");
  const std::vector<std::size_t> positions = centered.Lookup(dataset.row_ids);
  const std::size_t k = centered.NumClasses();

  data::Dataset out;
  out.schema = dataset.schema;
  for (const std::string& label : centered.class_labels) {
    const std::string name = kStackedPrefix + label;
    const bool taken = std::any_of(out.schema.columns.begin(), out.schema.columns.end(),
                                   [&](const data::Column& c) { return c.name == name; });
    Check(!taken, ErrorCode::kInvalidArgument, "column-name collision: " + name);
    out.schema.columns.push_back({name, data::ColumnKind::kNumeric});
  }
  out.n_rows = dataset.n_rows;
  out.n_features = dataset.n_features + k;
  out.labels = dataset.labels;
  out.row_ids = dataset.row_ids;
  out.category_maps = dataset.category_maps;
  out.category_maps.resize(out.n_features);
  out.features.reserve(out.n_rows * out.n_features);
  for (std::size_t r = 0; r < dataset.n_rows; ++r) {
    const auto row = dataset.Row(r);
    out.features.insert(out.features.end(), row.begin(), row.end());
    for (std::size_t c = 0; c < k; ++c) out.features.push_back(centered.scores.at(positions[r], c));
  }
  return out;
}

}  // namespace priorboost::baselines
