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

#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "common/error.hpp"

namespace priorboost::metrics {

const char* ToString(MethodTag method) {
  switch (method) {
    case MethodTag::kGbdt: return "gbdt";
    case MethodTag::kPrior: return "prior";
    case MethodTag::kSelection: return "selection";
    case MethodTag::kStacking: return "stacking";
    case MethodTag::kFused: return "fused";
  }
  return "?";
}

MethodTag ParseMethod(const std::string& name) {
  for (MethodTag m : kAllMethods) {
    if (name == ToString(m)) return m;
  }
  Fail(ErrorCode::kParse, "unknown method: " + name);
}

double AucBinary(std::span<const double> scores, std::span<const int> labels) {
  Check(scores.size() == labels.size(), ErrorCode::kInvalidArgument,
        "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Check(labels[i] == 0 || labels[i] == 1, ErrorCode::kInvalidArgument, "labels must be 0/1");
    Check(!std::isnan(scores[i]), ErrorCode::kInvalidArgument, "NaN score");
    n_pos += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t n_neg = n - n_pos;
  Check(n_pos > 0 && n_neg > 0, ErrorCode::kFailedPrecondition, "undefined AUC: single-class input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based midranks of the positives.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

MulticlassAuc AucMulticlass(const gbdt::MarginMatrix& scores, std::span<const int> labels) {
  Check(scores.rows == labels.size(), ErrorCode::kInvalidArgument, "scores and labels differ in length");
  Check(scores.cols >= 2, ErrorCode::kInvalidArgument, "need at least two classes");
  MulticlassAuc result;
  if (scores.cols == 2) {
    std::vector<double> positive(scores.rows);
    for (std::size_t i = 0; i < scores.rows; ++i) positive[i] = scores.at(i, 1);
    result.value = AucBinary(positive, labels);
    return result;
  }
  std::vector<double> column(scores.rows);
  std::vector<int> one_vs_rest(scores.rows);
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < scores.cols; ++k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.rows; ++i) {
      column[i] = scores.at(i, k);
      one_vs_rest[i] = labels[i] == static_cast<int>(k) ? 1 : 0;
      hits += static_cast<std::size_t>(one_vs_rest[i]);
    }
    if (hits == 0 || hits == scores.rows) {
      result.notes.push_back("class " + std::to_string(k) + " skipped: " +
                             (hits == 0 ? "absent from labels" : "only class present"));
      continue;
    }
    total += AucBinary(column, one_vs_rest);
    ++used;
  }
  Check(used > 0, ErrorCode::kFailedPrecondition, "undefined AUC: single-class input");
  result.value = total / static_cast<double>(used);
  return result;
}

std::vector<double> ZScores(std::span<const double> values) {
  Check(values.size() >= 2, ErrorCode::kInvalidArgument, "z-scores need at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / n);
  std::vector<double> out(values.size(), 0.0);
  if (sigma == 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sigma;
  return out;
}

std::vector<double> Ranks(std::span<const double> values) {
  Check(values.size() >= 2, ErrorCode::kInvalidArgument, "ranks need at least two values");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> out(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) out[order[k]] = avg;
    i = j;
  }
  return out;
}

bool SizeLess(data::NominalSize a, data::NominalSize b) {
  if (a == b) return false;
  if (a == data::kFullSize) return false;
  if (b == data::kFullSize) return true;
  return a < b;
}

void SortRecords(std::vector<EvalRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    if (a.dataset != b.dataset) return a.dataset < b.dataset;
    if (a.size != b.size) return SizeLess(a.size, b.size);
    if (a.seed != b.seed) return a.seed < b.seed;
    return static_cast<int>(a.method) < static_cast<int>(b.method);
  });
}

namespace {

std::string GroupName(const std::string& dataset, data::NominalSize size, std::uint64_t seed) {
  return dataset + "/size=" + data::SizeToString(size) + "/seed=" + std::to_string(seed);
}

}  // namespace

AggregateReport Aggregate(std::vector<EvalRecord> records) {
  Check(!records.empty(), ErrorCode::kInvalidArgument, "no records to aggregate");
  SortRecords(records);
  AggregateReport report;

  // Method sets per (dataset, size, seed) must agree.
  std::set<MethodTag> reference;
  std::string reference_group;
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    std::set<MethodTag> methods;
    while (j < records.size() && records[j].dataset == records[i].dataset &&
           records[j].size == records[i].size && records[j].seed == records[i].seed) {
      Check(methods.insert(records[j].method).second, ErrorCode::kInvalidArgument,
            "duplicate record for " + GroupName(records[j].dataset, records[j].size, records[j].seed) +
                " method " + ToString(records[j].method));
      ++j;
    }
    const std::string group = GroupName(records[i].dataset, records[i].size, records[i].seed);
    if (reference_group.empty()) {
      reference = methods;
      reference_group = group;
    } else {
      Check(methods == reference, ErrorCode::kInvalidArgument,
            "inconsistent method sets: " + group + " differs from " + reference_group);
    }
    i = j;
  }
  const std::vector<MethodTag> methods(reference.begin(), reference.end());
  const std::size_t m = methods.size();

  // Per (dataset, size): per-method seed statistics, then ranks and z-scores.
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    while (j < records.size() && records[j].dataset == records[i].dataset &&
           records[j].size == records[i].size) {
      ++j;
    }
    RowSummary row;
    row.dataset = records[i].dataset;
    row.size = records[i].size;
    row.methods = methods;
    row.stats.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<double> test;
      double val_sum = 0.0;
      for (std::size_t r = i; r < j; ++r) {
        if (records[r].method != methods[k]) continue;
        test.push_back(records[r].test_auc);
        val_sum += records[r].val_auc;
      }
      CellStats& s = row.stats[k];
      s.n_seeds = test.size();
      const double n = static_cast<double>(test.size());
      s.mean_test_auc = std::accumulate(test.begin(), test.end(), 0.0) / n;
      s.mean_val_auc = val_sum / n;
      if (test.size() > 1) {
        double ss = 0.0;
        for (double v : test) ss += (v - s.mean_test_auc) * (v - s.mean_test_auc);
        s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
      }
    }
    if (m >= 2) {
      std::vector<double> means(m);
      for (std::size_t k = 0; k < m; ++k) means[k] = row.stats[k].mean_test_auc;
      row.ranks = Ranks(means);
      row.zscores = ZScores(means);
    } else {
      row.ranks.assign(m, 1.0);
      row.zscores.assign(m, 0.0);
    }
    report.rows.push_back(std::move(row));
    i = j;
  }

  // Per size: average across the datasets that have it.
  std::vector<data::NominalSize> sizes;
  for (const RowSummary& row : report.rows) {
    if (std::find(sizes.begin(), sizes.end(), row.size) == sizes.end()) sizes.push_back(row.size);
  }
  std::sort(sizes.begin(), sizes.end(), SizeLess);
  for (data::NominalSize size : sizes) {
    SizeSummary s;
    s.size = size;
    s.methods = methods;
    s.mean_auc.assign(m, 0.0);
    s.mean_rank.assign(m, 0.0);
    s.mean_z.assign(m, 0.0);
    for (const RowSummary& row : report.rows) {
      if (row.size != size) continue;
      ++s.n_datasets;
      for (std::size_t k = 0; k < m; ++k) {
        s.mean_auc[k] += row.stats[k].mean_test_auc;
        s.mean_rank[k] += row.ranks[k];
        s.mean_z[k] += row.zscores[k];
      }
    }
    const double d = static_cast<double>(s.n_datasets);
    for (std::size_t k = 0; k < m; ++k) {
      s.mean_auc[k] /= d;
      s.mean_rank[k] /= d;
      s.mean_z[k] /= d;
    }
    report.sizes.push_back(std::move(s));
  }
  report.records = std::move(records);
  return report;
}

}  // namespace priorboost::metrics
