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

#ifndef PRIORBOOST_METRICS_METRICS_HPP_
#define PRIORBOOST_METRICS_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::metrics {

// Methods compared by the benchmark, in canonical report order.
enum class MethodTag { kGbdt, kPrior, kSelection, kStacking, kFused };

inline constexpr MethodTag kAllMethods[] = {MethodTag::kGbdt, MethodTag::kPrior,
                                            MethodTag::kSelection, MethodTag::kStacking,
                                            MethodTag::kFused};

const char* ToString(MethodTag method);
MethodTag ParseMethod(const std::string& name);

// Mann-Whitney AUC with midrank ties. Labels are 0/1. Throws "undefined AUC"
// when only one class is present.
double AucBinary(std::span<const double> scores, std::span<const int> labels);

struct MulticlassAuc {
  double value = 0.0;
  std::vector<std::string> notes;  // classes skipped for absence
};

// Macro one-vs-rest over the columns of an n x K score matrix. Classes absent
// from labels are skipped with a note; for K = 2 this is AucBinary on the
// positive column.
MulticlassAuc AucMulticlass(const gbdt::MarginMatrix& scores, std::span<const int> labels);

// (v − mean) / population std; all zeros when the std is zero.
std::vector<double> ZScores(std::span<const double> values);

// Rank 1 = largest value; ties share the average of the ranks they span.
std::vector<double> Ranks(std::span<const double> values);

struct EvalRecord {
  std::string dataset;
  data::NominalSize size = 0;
  std::uint64_t seed = 0;
  MethodTag method = MethodTag::kGbdt;
  double val_auc = 0.0;
  double test_auc = 0.0;
};

struct CellStats {
  double mean_test_auc = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n_seeds)
  double mean_val_auc = 0.0;
  std::size_t n_seeds = 0;
};

// One (dataset, size) row of the comparison.
struct RowSummary {
  std::string dataset;
  data::NominalSize size = 0;
  std::vector<MethodTag> methods;
  std::vector<CellStats> stats;
  std::vector<double> ranks;
  std::vector<double> zscores;
};

struct SizeSummary {
  data::NominalSize size = 0;
  std::vector<MethodTag> methods;
  std::vector<double> mean_auc;
  std::vector<double> mean_rank;
  std::vector<double> mean_z;
  std::size_t n_datasets = 0;
};

struct AggregateReport {
  std::vector<EvalRecord> records;  // canonical order
  std::vector<RowSummary> rows;     // by dataset, then size
  std::vector<SizeSummary> sizes;   // ascending, full last
  std::vector<std::string> notes;
};

// Sorts by (dataset, size with full last, seed, method).
void SortRecords(std::vector<EvalRecord>& records);
bool SizeLess(data::NominalSize a, data::NominalSize b);

AggregateReport Aggregate(std::vector<EvalRecord> records);

}  // namespace priorboost::metrics

#endif  // PRIORBOOST_METRICS_METRICS_HPP_
