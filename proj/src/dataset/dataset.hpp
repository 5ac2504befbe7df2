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

// Tabular ingestion: schema inference, CSV loading with categorical encoding,
// and the seeded train/validation/test subsample ladder.

#ifndef PRIORBOOST_DATASET_DATASET_HPP_
#define PRIORBOOST_DATASET_DATASET_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace priorboost::data {

using RowId = std::int64_t;

// Missing feature values are stored as quiet NaN. No other NaN may appear in
// a feature matrix.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool IsMissing(double v) { return std::isnan(v); }

inline constexpr std::size_t kMaxClasses = 5;

enum class ColumnKind { kNumeric, kCategorical };

const char* ToString(ColumnKind kind);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
};

// Columns in file order, target included. The target column's kind is
// irrelevant; its values are mapped through class_labels.
struct TableSchema {
  std::vector<Column> columns;
  std::string target;
  std::vector<std::string> class_labels;

  std::size_t TargetIndex() const;
  std::vector<Column> FeatureColumns() const;
  std::size_t NumClasses() const { return class_labels.size(); }

  // Throws on any violated invariant.
  void Validate() const;

  // Line-oriented text form (used by the `schema` CLI verb).
  std::string ToText() const;
  static TableSchema FromText(const std::string& text);
};

class CategoryMap {
 public:
  // Returns the code for a category, assigning the next code on first sight.
  std::int64_t Encode(const std::string& value);
  std::optional<std::int64_t> Find(const std::string& value) const;
  const std::string& Decode(std::int64_t code) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::int64_t> codes_;
};

// Immutable after construction; row-major feature matrix.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<RowId> row_ids;
  TableSchema schema;
  // One entry per feature column; engaged for categorical columns.
  std::vector<std::optional<CategoryMap>> category_maps;

  double At(std::size_t row, std::size_t feature) const {
    return features[row * n_features + feature];
  }
  std::span<const double> Row(std::size_t row) const {
    return {features.data() + row * n_features, n_features};
  }
  std::size_t NumClasses() const { return schema.NumClasses(); }

  // Rows with the given ids, in the given order.
  Dataset Subset(std::span<const RowId> ids) const;
  // Index of each id in this dataset; throws on unknown ids.
  std::vector<std::size_t> IndicesOf(std::span<const RowId> ids) const;

  void Validate() const;
};

TableSchema InferSchema(const std::string& path, const std::string& target_name);
Dataset LoadCsv(const std::string& path, const TableSchema& schema);

// Nominal train size; kFullSize selects the whole non-test remainder.
using NominalSize = int;
inline constexpr NominalSize kFullSize = -1;

std::string SizeToString(NominalSize size);
std::optional<NominalSize> ParseSize(const std::string& text);

struct SplitSpec {
  std::uint64_t seed = 0;
  NominalSize nominal_size = 0;
  std::vector<RowId> train_ids;
  std::vector<RowId> val_ids;
  std::vector<RowId> test_ids;
};

struct SplitPlan {
  std::vector<SplitSpec> splits;
  // Sizes dropped as infeasible for this dataset.
  std::vector<std::string> notes;
};

struct SplitOptions {
  double test_fraction = 0.2;
  // Overrides test_fraction when set.
  std::optional<std::size_t> test_size;
  // Seed of the single test draw shared by every split of the dataset.
  std::uint64_t test_seed = 0;
};

std::vector<RowId> DrawTestIds(const Dataset& dataset, const SplitOptions& options);

SplitPlan MakeSplits(const Dataset& dataset, std::span<const NominalSize> sizes,
                     std::span<const std::uint64_t> seeds,
                     const SplitOptions& options = {});

// `dataset,size,seed,role,row_id` audit table.
std::string SplitManifest(const std::string& dataset_name, std::span<const SplitSpec> splits);

// Seeded uniform permutation of feature column names. Kinds, data order and
// target are untouched.
TableSchema ShuffleHeaders(const TableSchema& schema, std::uint64_t seed);

}  // namespace priorboost::data

#endif  // PRIORBOOST_DATASET_DATASET_HPP_
