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

// Random-search hyperparameter tuning over fixed search spaces, plus the
// sequential scale study: GBDT parameters are tuned first, then the fusion
// scale alone with the GBDT parameters frozen.
//
// Trial i draws its parameters and its model seed from streams derived from
// (study seed, i), so trials can run in any order or in parallel and the
// study is a pure function of its inputs. A study of budget b is a prefix of
// any larger study with the same seed.

#ifndef PRIORBOOST_HPO_HPO_HPP_
#define PRIORBOOST_HPO_HPO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common/rng.hpp"
#include "dataset/dataset.hpp"
#include "fusion/fusion.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::hpo {

enum class DistKind { kUniformInt, kUniform, kLogUniform, kMaybeZeroLogUniform };

struct Distribution {
  std::string name;
  DistKind kind = DistKind::kUniform;
  double lo = 0.0;
  double hi = 1.0;

  double Sample(Rng& rng) const;
};

// Parameter values in declaration order.
using Assignment = std::vector<std::pair<std::string, double>>;

double Get(const Assignment& assignment, const std::string& name);

enum class EngineStyle { kXgboost, kLightgbm };

const char* ToString(EngineStyle style);
EngineStyle ParseEngineStyle(const std::string& name);

struct SearchSpace {
  EngineStyle style = EngineStyle::kXgboost;
  std::vector<Distribution> params;
  Assignment fixed;  // non-searched values, e.g. the round count

  void Validate() const;
  Assignment Sample(Rng& rng) const;
  gbdt::GbdtParams ToParams(const Assignment& assignment) const;

  static SearchSpace XgboostStyle();
  static SearchSpace LightgbmStyle();
  static SearchSpace For(EngineStyle style);
};

// The fusion scale: {0, LogUniform[1e-4, 1e4]}.
Distribution ScaleDistribution();

struct Trial {
  int index = 0;
  Assignment params;
  std::optional<double> scale;
  std::uint64_t seed = 0;  // model training seed
  double val_auc = 0.0;
  double val_loss = 0.0;  // breaks exact AUC ties, which are common on tiny validation sets
  bool failed = false;
  std::string error;
};

struct StudyResult {
  std::vector<Trial> trials;
  int best = -1;  // argmax val_auc over non-failed trials, then min val_loss, then lowest index

  const Trial& Best() const;
  // `trial,param_json,val_auc` audit log.
  std::string Log() const;
};

// Picks the best trial and throws when every trial failed.
void SelectBest(StudyResult& study);

// First `budget` trials of a study, with the best recomputed.
StudyResult Prefix(const StudyResult& study, std::size_t budget);

std::uint64_t TrialModelSeed(std::uint64_t study_seed, int trial_index);

struct TuneOptions {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Validation AUC of a model trained on the split's train rows. `base_margins`
// is aligned to dataset rows; an empty matrix means zero margins.
double ValidationAuc(const data::Dataset& dataset, const data::SplitSpec& split,
                     const gbdt::GbdtParams& params, const gbdt::MarginMatrix& base_margins,
                     std::uint64_t model_seed);

StudyResult TuneGbdt(const data::Dataset& dataset, const data::SplitSpec& split,
                     const SearchSpace& space, int budget, const gbdt::MarginMatrix& base_margins,
                     const TuneOptions& options);

struct ScaleStudy {
  fusion::ScaleParam best;
  StudyResult study;
};

// Trial 0 is always s = 0, trained with the same parameters and model seed as
// the stage-one winner, so the reported validation AUC never falls below it.
ScaleStudy TuneScale(const data::Dataset& dataset, const data::SplitSpec& split,
                     const fusion::PriorScores& centered, const gbdt::GbdtParams& fixed_params,
                     std::uint64_t model_seed, int budget, const TuneOptions& options);

}  // namespace priorboost::hpo

#endif  // PRIORBOOST_HPO_HPO_HPP_
