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


// Benchmark driver. Cells (dataset, size, seed) run in canonical order; each
// evaluates every requested method and appends its records to
// `<output>/records.csv` in one write, so an interrupted run loses at most the
// cell in flight. A rerun keeps complete cells, drops partial ones, and at the
// end rewrites the file in canonical order.

#ifndef PRIORBOOST_BENCH_RUNNER_HPP_
#define PRIORBOOST_BENCH_RUNNER_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bench/config.hpp"
#include "metrics/metrics.hpp"

namespace priorboost::bench {

// Train / val / test row counts of one (dataset, size) row.
struct SplitShape {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

using ShapeKey = std::pair<std::string, data::NominalSize>;
using ShapeMap = std::map<ShapeKey, SplitShape>;

struct RunOptions {
  // Stop after computing this many new cells (simulates an interruption).
  std::optional<std::size_t> max_new_cells;
  std::function<void(const std::string&)> log;
};

struct RunResult {
  metrics::AggregateReport report;
  ShapeMap shapes;
  std::size_t cells_total = 0;
  std::size_t cells_reused = 0;
  std::size_t cells_computed = 0;
  std::size_t cells_failed = 0;
  bool interrupted = false;
  std::vector<std::string> notes;

  // The run finished without a single record to report.
  bool TotalFailure() const { return !interrupted && report.records.empty(); }
};

// Validates the config, runs or resumes it and, unless interrupted, writes the
// full report into config.output.
RunResult RunBenchmark(const BenchConfig& config, const RunOptions& options = {});

// records.csv codec.
std::string FormatRecords(const std::vector<metrics::EvalRecord>& records);
// Lines that fail to parse (e.g. a torn final write) are skipped and counted.
std::vector<metrics::EvalRecord> ParseRecords(const std::string& text, std::size_t* discarded = nullptr);

// splits.csv codec: `dataset,size,train,val,test`.
std::string FormatShapes(const ShapeMap& shapes);
ShapeMap ParseShapes(const std::string& text);

// summary_by_size.csv: `size,method,n_datasets,mean_auc,mean_rank,mean_z`.
std::string FormatSummaryBySize(const metrics::AggregateReport& report);
// Per-dataset tables with best-per-row bolding, then per-size summaries.
std::string FormatTables(const metrics::AggregateReport& report, const ShapeMap& shapes,
                         const BenchConfig* config);

// Writes records.csv, summary_by_size.csv, tables.md and notes.txt.
void EmitReport(const metrics::AggregateReport& report, const ShapeMap& shapes,
                const std::string& out_dir, const BenchConfig* config = nullptr);

}  // namespace priorboost::bench

#endif  // PRIORBOOST_BENCH_RUNNER_HPP_
