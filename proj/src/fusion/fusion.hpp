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

// Prior-seeded boosting. Per-row transformer scores are centered, multiplied
// by a scale s and installed as the base margin, so the trees fit the
// residual of the scaled prior:
//
//   margin(row) = s * centered_score(row) + sum of tree outputs(row)
//
// s = 0 reproduces the plain GBDT exactly; as s grows the output defers to
// the prior. The prior is required at inference as well as at training time.

#ifndef PRIORBOOST_FUSION_FUSION_HPP_
#define PRIORBOOST_FUSION_FUSION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset/dataset.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::fusion {

enum class PriorSource { kLlm, kTabpfn, kSynthetic };

const char* ToString(PriorSource source);
PriorSource ParseSource(const std::string& name);

// Axis of mean subtraction: per row across classes (default), or per class
// across all rows.
enum class CenteringAxis { kRow, kColumn };

const char* ToString(CenteringAxis axis);
CenteringAxis ParseAxis(const std::string& name);

struct PriorScores {
  std::vector<data::RowId> row_ids;
  gbdt::MarginMatrix scores;  // n x K, columns in class_labels order
  std::vector<std::string> class_labels;
  PriorSource source = PriorSource::kSynthetic;
  std::string model;  // free-text model identifier
  bool centered = false;
  CenteringAxis axis = CenteringAxis::kRow;

  std::size_t NumClasses() const { return scores.cols; }
  // Position of each requested id; throws "uncovered rows" listing misses.
  std::vector<std::size_t> Lookup(std::span<const data::RowId> ids) const;
  // Content hash over row ids, class labels and raw score bits.
  std::uint64_t Hash() const;
  void Validate() const;
};

// Score file: optional `# source=<llm|tabpfn|synthetic> model=<text>` line,
// then `row_id,<class_0>,...,<class_{K-1}>`, then one row per dataset row.
// Class names must equal expected_labels exactly and in order.
PriorScores ReadScoreFile(const std::string& path, std::span<const std::string> expected_labels);
std::string FormatScoreFile(const PriorScores& scores);
void WriteScoreFile(const PriorScores& scores, const std::string& path);

PriorScores CenterScores(const PriorScores& raw, CenteringAxis axis = CenteringAxis::kRow);

// Fusion scale: exactly 0, or within [1e-4, 1e4].
class ScaleParam {
 public:
  static constexpr double kMin = 1e-4;
  static constexpr double kMax = 1e4;

  ScaleParam() = default;
  explicit ScaleParam(double s);
  double value() const { return s_; }

 private:
  double s_ = 0.0;
};

// Margins for the rows of `centered` in stored order. Multiclass: s·score.
// Binary: s·score[positive] (row axis) or s·(score1 − score0)/2 (column axis).
gbdt::MarginMatrix ScoresToMargins(const PriorScores& centered, ScaleParam s,
                                   gbdt::Objective objective);

// Margins for specific dataset rows, looked up by id.
gbdt::MarginMatrix MarginsForRows(const PriorScores& centered, ScaleParam s,
                                  gbdt::Objective objective, std::span<const data::RowId> ids);

struct FusedModel {
  gbdt::Ensemble ensemble;
  ScaleParam scale;
  std::uint64_t prior_hash = 0;
  std::vector<std::string> class_labels;
  CenteringAxis axis = CenteringAxis::kRow;
};

// Trains on split.train_ids. The prior must cover train, val and test ids.
FusedModel TrainFused(const data::Dataset& dataset, const data::SplitSpec& split,
                      const PriorScores& centered, ScaleParam s, const gbdt::GbdtParams& params,
                      std::uint64_t seed);

// Raw fused margins for the given rows.
gbdt::MarginMatrix PredictFusedMargin(const FusedModel& model, const data::Dataset& dataset,
                                      std::span<const data::RowId> ids, const PriorScores& centered);

gbdt::MarginMatrix PredictFused(const FusedModel& model, const data::Dataset& dataset,
                                std::span<const data::RowId> ids, const PriorScores& centered);

std::string SaveFusedModel(const FusedModel& model);
FusedModel LoadFusedModel(const std::string& text);

}  // namespace priorboost::fusion

#endif  // PRIORBOOST_FUSION_FUSION_HPP_
