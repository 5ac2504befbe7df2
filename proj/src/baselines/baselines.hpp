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

#ifndef PRIORBOOST_BASELINES_BASELINES_HPP_
#define PRIORBOOST_BASELINES_BASELINES_HPP_

#include "dataset/dataset.hpp"
#include "fusion/fusion.hpp"
#include "metrics/metrics.hpp"

namespace priorboost::baselines {

// Validation-based model selection. Ties go to the GBDT.
metrics::MethodTag SelectBest(double gbdt_val_auc, double prior_val_auc);

inline constexpr const char* kStackedPrefix = "__prior_";

// Appends one numeric feature `__prior_<class>` per class holding the
// centered prior score of each row. Original columns are untouched.
data::Dataset StackFeatures(const data::Dataset& dataset, const fusion::PriorScores& centered);

}  // namespace priorboost::baselines

#endif  // PRIORBOOST_BASELINES_BASELINES_HPP_
