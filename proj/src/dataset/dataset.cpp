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

#include "dataset/dataset.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"

namespace priorboost::data {
namespace {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable ReadTable(const std::string& path) {
  const std::vector<std::string> lines = text::ReadLines(path);
  RawTable table;
  std::size_t line_no = 0;
  for (const std::string& line : lines) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    std::vector<std::string> fields = text::SplitCsvLine(line);
    if (table.header.empty()) {
      for (auto& f : fields) f = std::string(text::Trim(f));
      table.header = std::move(fields);
      continue;
    }
    Check(fields.size() == table.header.size(), ErrorCode::kParse,
          path + ":" + std::to_string(line_no) + ": ragged row (" +
              std::to_string(fields.size()) + " fields, header has " +
              std::to_string(table.header.size()) + ")");
    table.rows.push_back(std::move(fields));
  }
  Check(!table.header.empty(), ErrorCode::kParse, "empty file: " + path);
  return table;
}

ColumnKind ParseKind(const std::string& s) {
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "categorical") return ColumnKind::kCategorical;
  Fail(ErrorCode::kParse, "unknown column kind: " + s);
}

}  // namespace

const char* ToString(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

std::size_t TableSchema::TargetIndex() const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == target) return i;
  }
  Fail(ErrorCode::kInvalidArgument, "missing target column: " + target);
}

std::vector<Column> TableSchema::FeatureColumns() const {
  std::vector<Column> out;
  for (const Column& c : columns) {
    if (c.name != target) out.push_back(c);
  }
  return out;
}

void TableSchema::Validate() const {
  const auto hits = std::count_if(columns.begin(), columns.end(),
                                  [&](const Column& c) { return c.name == target; });
  Check(hits == 1, ErrorCode::kInvalidArgument,
        "target '" + target + "' must appear exactly once in the schema");
  Check(columns.size() >= 2, ErrorCode::kInvalidArgument, "schema needs at least one feature column");
  Check(class_labels.size() >= 2, ErrorCode::kInvalidArgument, "fewer than 2 classes");
  Check(class_labels.size() <= kMaxClasses, ErrorCode::kInvalidArgument, "too many classes");
  std::set<std::string> unique(class_labels.begin(), class_labels.end());
  Check(unique.size() == class_labels.size(), ErrorCode::kInvalidArgument,
        "class labels must be unique");
}

std::string TableSchema::ToText() const {
  std::ostringstream out;
  out << "target," << text::CsvField(target) << "\n";
  for (const auto& label : class_labels) out << "class," << text::CsvField(label) << "\n";
  for (const auto& c : columns) {
    out << "column," << text::CsvField(c.name) << "," << ToString(c.kind) << "\n";
  }
  return out.str();
}

TableSchema TableSchema::FromText(const std::string& text) {
  TableSchema schema;
  for (const std::string& line : text::Split(text, '\n')) {
    if (text::Trim(line).empty()) continue;
    const auto fields = text::SplitCsvLine(line);
    if (fields[0] == "target" && fields.size() == 2) {
      schema.target = fields[1];
    } else if (fields[0] == "class" && fields.size() == 2) {
      schema.class_labels.push_back(fields[1]);
    } else if (fields[0] == "column" && fields.size() == 3) {
      schema.columns.push_back({fields[1], ParseKind(fields[2])});
    } else {
      Fail(ErrorCode::kParse, "bad schema line: " + line);
    }
  }
  schema.Validate();
  return schema;
}

std::int64_t CategoryMap::Encode(const std::string& value) {
  const auto it = codes_.find(value);
  if (it != codes_.end()) return it->second;
  const auto code = static_cast<std::int64_t>(values_.size());
  values_.push_back(value);
  codes_.emplace(value, code);
  return code;
}

std::optional<std::int64_t> CategoryMap::Find(const std::string& value) const {
  const auto it = codes_.find(value);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

const std::string& CategoryMap::Decode(std::int64_t code) const {
  Check(code >= 0 && static_cast<std::size_t>(code) < values_.size(),
        ErrorCode::kInvalidArgument, "category code out of range");
  return values_[static_cast<std::size_t>(code)];
}

Dataset Dataset::Subset(std::span<const RowId> ids) const {
  const std::vector<std::size_t> index = IndicesOf(ids);
  Dataset out;
  out.n_rows = ids.size();
  out.n_features = n_features;
  out.schema = schema;
  out.category_maps = category_maps;
  out.features.reserve(out.n_rows * n_features);
  out.labels.reserve(out.n_rows);
  out.row_ids.reserve(out.n_rows);
  for (std::size_t i : index) {
    const auto row = Row(i);
    out.features.insert(out.features.end(), row.begin(), row.end());
    out.labels.push_back(labels[i]);
    out.row_ids.push_back(row_ids[i]);
  }
  return out;
}

std::vector<std::size_t> Dataset::IndicesOf(std::span<const RowId> ids) const {
  std::unordered_map<RowId, std::size_t> position;
  position.reserve(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) position.emplace(row_ids[i], i);
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (RowId id : ids) {
    const auto it = position.find(id);
    Check(it != position.end(), ErrorCode::kNotFound, "unknown row id " + std::to_string(id));
    out.push_back(it->second);
  }
  return out;
}

void Dataset::Validate() const {
  schema.Validate();
  Check(features.size() == n_rows * n_features, ErrorCode::kInvalidArgument,
        "feature matrix shape mismatch");
  Check(labels.size() == n_rows && row_ids.size() == n_rows, ErrorCode::kInvalidArgument,
        "label / row id count mismatch");
  Check(category_maps.size() == n_features, ErrorCode::kInvalidArgument,
        "category map count mismatch");
  const int k = static_cast<int>(NumClasses());
  for (int y : labels) {
    Check(y >= 0 && y < k, ErrorCode::kInvalidArgument, "label index out of range");
  }
  std::unordered_set<RowId> seen(row_ids.begin(), row_ids.end());
  Check(seen.size() == n_rows, ErrorCode::kInvalidArgument, "row ids are not unique");
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t f = 0; f < n_features; ++f) {
      const double v = At(r, f);
      if (IsMissing(v)) continue;
      Check(std::isfinite(v), ErrorCode::kInvalidArgument, "non-finite feature value");
      if (category_maps[f]) {
        Check(v >= 0 && v < static_cast<double>(category_maps[f]->size()),
              ErrorCode::kInvalidArgument, "category code out of range");
      }
    }
  }
}

TableSchema InferSchema(const std::string& path, const std::string& target_name) {
  const RawTable table = ReadTable(path);
  Check(!table.rows.empty(), ErrorCode::kParse, "empty file: " + path);

  TableSchema schema;
  schema.target = target_name;
  const auto target_it = std::find(table.header.begin(), table.header.end(), target_name);
  Check(target_it != table.header.end(), ErrorCode::kInvalidArgument,
        "missing target column: " + target_name);
  const std::size_t target_col = static_cast<std::size_t>(target_it - table.header.begin());

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    Column column{table.header[c], ColumnKind::kNumeric};
    if (c != target_col) {
      for (const auto& row : table.rows) {
        const std::string_view cell = text::Trim(row[c]);
        if (!cell.empty() && !text::ParseDouble(cell)) {
          column.kind = ColumnKind::kCategorical;
          break;
        }
      }
    } else {
      column.kind = ColumnKind::kCategorical;
    }
    schema.columns.push_back(std::move(column));
  }

  std::set<std::string> labels;
  for (const auto& row : table.rows) {
    const std::string value(text::Trim(row[target_col]));
    Check(!value.empty(), ErrorCode::kParse, "empty target cell");
    labels.insert(value);
  }
  Check(labels.size() <= kMaxClasses, ErrorCode::kInvalidArgument,
        "too many classes (" + std::to_string(labels.size()) + " distinct target values)");
  schema.class_labels.assign(labels.begin(), labels.end());
  schema.Validate();
  return schema;
}

Dataset LoadCsv(const std::string& path, const TableSchema& schema) {
  schema.Validate();
  const RawTable table = ReadTable(path);
  Check(table.header.size() == schema.columns.size(), ErrorCode::kInvalidArgument,
        "schema does not match header of " + path);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    Check(table.header[c] == schema.columns[c].name, ErrorCode::kInvalidArgument,
          "schema does not match header column '" + table.header[c] + "'");
  }

  const std::size_t target_col = schema.TargetIndex();
  std::unordered_map<std::string, int> label_index;
  for (std::size_t k = 0; k < schema.class_labels.size(); ++k) {
    label_index.emplace(schema.class_labels[k], static_cast<int>(k));
  }

  Dataset ds;
  ds.schema = schema;
  ds.n_rows = table.rows.size();
  ds.n_features = schema.columns.size() - 1;
  ds.features.reserve(ds.n_rows * ds.n_features);
  ds.labels.reserve(ds.n_rows);
  ds.row_ids.reserve(ds.n_rows);
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (c == target_col) continue;
    if (schema.columns[c].kind == ColumnKind::kCategorical) {
      ds.category_maps.emplace_back(CategoryMap{});
    } else {
      ds.category_maps.emplace_back(std::nullopt);
    }
  }

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::size_t f = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == target_col) continue;
      const std::string_view cell = text::Trim(row[c]);
      double value = kMissing;
      if (!cell.empty()) {
        if (ds.category_maps[f]) {
          value = static_cast<double>(ds.category_maps[f]->Encode(std::string(cell)));
        } else {
          const auto parsed = text::ParseDouble(cell);
          Check(parsed.has_value(), ErrorCode::kParse,
                "unparseable numeric cell '" + std::string(cell) + "' in column '" +
                    schema.columns[c].name + "', data row " + std::to_string(r + 1));
          value = *parsed;
        }
      }
      ds.features.push_back(value);
      ++f;
    }
    const std::string target(text::Trim(row[target_col]));
    const auto it = label_index.find(target);
    Check(it != label_index.end(), ErrorCode::kParse, "unknown target label '" + target + "'");
    ds.labels.push_back(it->second);
    ds.row_ids.push_back(static_cast<RowId>(r));
  }
  return ds;
}

std::string SizeToString(NominalSize size) {
  return size == kFullSize ? "full" : std::to_string(size);
}

std::optional<NominalSize> ParseSize(const std::string& s) {
  const std::string_view t = text::Trim(s);
  if (t == "full" || t == "FULL") return kFullSize;
  const auto v = text::ParseInt(t);
  if (!v || *v <= 0) return std::nullopt;
  return static_cast<NominalSize>(*v);
}

std::vector<RowId> DrawTestIds(const Dataset& dataset, const SplitOptions& options) {
  std::size_t test_size = 0;
  if (options.test_size) {
    test_size = *options.test_size;
  } else {
    Check(options.test_fraction > 0.0 && options.test_fraction < 1.0,
          ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
    // 1e-9 keeps exact products such as 0.2 * 1000 from rounding up.
    test_size = static_cast<std::size_t>(
        std::ceil(options.test_fraction * static_cast<double>(dataset.n_rows) - 1e-9));
  }
  Check(test_size >= 1 && test_size < dataset.n_rows, ErrorCode::kInvalidArgument,
        "test size " + std::to_string(test_size) + " infeasible for " +
            std::to_string(dataset.n_rows) + " rows");
  std::vector<RowId> ids = dataset.row_ids;
  std::sort(ids.begin(), ids.end());
  Rng rng(DeriveSeed(options.test_seed, 0x7e57));
  rng.Shuffle(ids);
  ids.resize(test_size);
  std::sort(ids.begin(), ids.end());
  return ids;
}

SplitPlan MakeSplits(const Dataset& dataset, std::span<const NominalSize> sizes,
                     std::span<const std::uint64_t> seeds, const SplitOptions& options) {
  SplitPlan plan;
  const std::vector<RowId> test_ids = DrawTestIds(dataset, options);
  std::vector<RowId> remainder;
  {
    std::vector<RowId> all = dataset.row_ids;
    std::sort(all.begin(), all.end());
    std::set_difference(all.begin(), all.end(), test_ids.begin(), test_ids.end(),
                        std::back_inserter(remainder));
  }
  const std::size_t pool = remainder.size();

  for (NominalSize size : sizes) {
    Check(size == kFullSize || size > 0, ErrorCode::kInvalidArgument,
          "nominal size must be positive or full");
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    if (size == kFullSize) {
      n_train = pool * 4 / 5;
      n_val = pool / 5;
    } else {
      n_train = n_val = static_cast<std::size_t>(size);
      if (2 * n_train > pool) {
        plan.notes.push_back("size " + std::to_string(size) + " skipped: needs " +
                             std::to_string(2 * n_train) + " non-test rows, have " +
                             std::to_string(pool));
        continue;
      }
    }
    if (n_train == 0 || n_val == 0) {
      plan.notes.push_back("size " + SizeToString(size) + " skipped: empty train or val");
      continue;
    }
    for (std::uint64_t seed : seeds) {
      SplitSpec spec;
      spec.seed = seed;
      spec.nominal_size = size;
      spec.test_ids = test_ids;
      std::vector<RowId> order = remainder;
      Rng rng(DeriveSeed(seed, 0x5b117, static_cast<std::uint64_t>(static_cast<std::int64_t>(size))));
      rng.Shuffle(order);
      spec.train_ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
      spec.val_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                          order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
      std::sort(spec.train_ids.begin(), spec.train_ids.end());
      std::sort(spec.val_ids.begin(), spec.val_ids.end());
      plan.splits.push_back(std::move(spec));
    }
  }
  return plan;
}

std::string SplitManifest(const std::string& dataset_name, std::span<const SplitSpec> splits) {
  std::ostringstream out;
  out << "dataset,size,seed,role,row_id\n";
  const std::string name = text::CsvField(dataset_name);
  for (const SplitSpec& s : splits) {
    const std::string prefix = name + "," + SizeToString(s.nominal_size) + "," +
                               std::to_string(s.seed) + ",";
    for (RowId id : s.train_ids) out << prefix << "train," << id << "\n";
    for (RowId id : s.val_ids) out << prefix << "val," << id << "\n";
    for (RowId id : s.test_ids) out << prefix << "test," << id << "\n";
  }
  return out.str();
}

TableSchema ShuffleHeaders(const TableSchema& schema, std::uint64_t seed) {
  TableSchema out = schema;
  std::vector<std::size_t> feature_slots;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (schema.columns[c].name == schema.target) continue;
    feature_slots.push_back(c);
    names.push_back(schema.columns[c].name);
  }
  Rng rng(DeriveSeed(seed, 0x4eade5));
  rng.Shuffle(names);
  for (std::size_t i = 0; i < feature_slots.size(); ++i) {
    out.columns[feature_slots[i]].name = names[i];
  }
  return out;
}

}  // namespace priorboost::data
