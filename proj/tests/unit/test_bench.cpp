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


#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "bench/config.hpp"
#include "bench/runner.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace priorboost::bench {
namespace {

using metrics::EvalRecord;
using metrics::MethodTag;
using testing::TempDir;

BenchConfig SmallSynthetic(const std::string& output) {
  BenchConfig c = ParseConfig(
      "sizes = 10,25\n"
      "seeds = 0,1\n"
      "budget_gbdt = 4\n"
      "budget_scale = 2\n"
      "budget_baseline = 6\n"
      "[dataset syn]\n"
      "synthetic = n_rows=300,quality=0.9\n"
      "seed = 3\n",
      "");
  c.output = output;
  return c;
}

TEST_CASE("config parsing and canonical text") {
  TempDir dir;
  const std::string path = dir.Write("bench.cfg",
                                     "# comment\n"
                                     "sizes = 10, 50, full\n"
                                     "seeds = 0,1,2\n"
                                     "space = lightgbm_style\n"
                                     "methods = gbdt,fused\n"
                                     "centering = column\n"
                                     "[dataset heart]\n"
                                     "data = heart.csv\n"
                                     "scores = heart_scores.csv\n"
                                     "target = HeartDisease\n"
                                     "test_size = 184\n");
  const BenchConfig c = LoadConfig(path);
  CHECK(c.sizes == std::vector<data::NominalSize>{10, 50, data::kFullSize});
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(c.space == hpo::EngineStyle::kLightgbm);
  CHECK(c.methods == std::vector<MethodTag>{MethodTag::kGbdt, MethodTag::kFused});
  CHECK(c.centering == fusion::CenteringAxis::kColumn);
  REQUIRE(c.datasets.size() == 1);
  CHECK(c.datasets[0].data_path == dir.File("heart.csv"));
  CHECK(c.datasets[0].test_size == std::size_t{184});
  CHECK_NOTHROW(c.Validate());
  CHECK(ParseConfig(c.ToText(), "").ToText() == c.ToText());

  BenchConfig d = c;
  d.Set("budget_scale=31");
  CHECK_THROWS_WITH(d.Validate(), doctest::Contains("unbalanced budgets"));
  d.Set("budget_baseline=131");
  CHECK_NOTHROW(d.Validate());
  d.Set("dataset.heart.target=Other");
  CHECK(d.datasets[0].target == "Other");
}

TEST_CASE("config errors carry line numbers") {
  CHECK_THROWS_WITH(ParseConfig("sizes = 10\nbogus = 3\n", ""), doctest::Contains("line 2"));
  CHECK_THROWS_WITH(ParseConfig("[dataset a]\nnope\n", ""), doctest::Contains("line 2"));
  CHECK_THROWS_AS(ParseConfig("methods = gbdt,xgb\n", ""), Error);
  CHECK_THROWS_AS(ParseConfig("sizes = ten\n", ""), Error);
}

TEST_CASE("a prior is only required when a method consumes one") {
  BenchConfig c = ParseConfig("[dataset d]\ndata = d.csv\ntarget = y\n", "/tmp");
  CHECK_THROWS_WITH(c.Validate(), doctest::Contains("scores"));
  c.Set("methods=gbdt");
  CHECK_FALSE(c.NeedsPrior());
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("records codec skips torn lines") {
  const std::vector<EvalRecord> records = {
      {"a", 10, 0, MethodTag::kGbdt, 0.75, 1.0 / 3.0},
      {"a", data::kFullSize, 1, MethodTag::kFused, 0.5, 0.9999999999999999},
  };
  const std::string text = FormatRecords(records);
  CHECK(text.rfind("dataset,size,seed,method,val_auc,test_auc\n", 0) == 0);
  std::size_t discarded = 0;
  const auto back = ParseRecords(text + "a,10,2,gb", &discarded);
  CHECK(discarded == 1);
  REQUIRE(back.size() == 2);
  CHECK(back[0].test_auc == records[0].test_auc);
  CHECK(back[1].size == data::kFullSize);
  CHECK(FormatRecords(back) == text);

  ShapeMap shapes;
  shapes[{"a", 10}] = {10, 10, 184};
  shapes[{"a", data::kFullSize}] = {587, 146, 184};
  CHECK(FormatShapes(ParseShapes(FormatShapes(shapes))) == FormatShapes(shapes));
}

TEST_CASE("tables bold the best method per row") {
  const metrics::AggregateReport r = metrics::Aggregate({
      {"abalone", data::kFullSize, 0, MethodTag::kGbdt, 0.84, 0.8454},
      {"abalone", data::kFullSize, 0, MethodTag::kFused, 0.85, 0.8559},
  });
  ShapeMap shapes;
  shapes[{"abalone", data::kFullSize}] = {1336, 334, 836};
  const std::string tables = FormatTables(r, shapes, nullptr);
  CHECK(tables.find("| 1336 | 334 | 836 | 0.8454 ± 0.0000 | **0.8559 ± 0.0000** |") != std::string::npos);

  const std::string summary = FormatSummaryBySize(r);
  CHECK(summary.rfind("size,method,n_datasets,mean_auc,mean_rank,mean_z\n", 0) == 0);
  CHECK(summary.find("full,fused,1,0.8559,1,1\n") != std::string::npos);
}

TEST_CASE("summary ranks sum to m(m+1)/2") {
  std::vector<EvalRecord> records;
  const double aucs[][3] = {{0.7, 0.8, 0.75}, {0.9, 0.6, 0.9}};
  const char* names[] = {"a", "b"};
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 3; ++m) {
      records.push_back({names[d], 10, 0, metrics::kAllMethods[m], aucs[d][m], aucs[d][m]});
    }
  }
  const metrics::AggregateReport r = metrics::Aggregate(records);
  const auto& ranks = r.sizes[0].mean_rank;
  CHECK(std::accumulate(ranks.begin(), ranks.end(), 0.0) == 6.0);
}

TEST_CASE("benchmark runs are deterministic and resumable") {
  TempDir dir;
  const BenchConfig full = SmallSynthetic(dir.File("full"));
  const RunResult a = RunBenchmark(full);
  CHECK(a.cells_total == 4);
  CHECK(a.cells_computed == 4);
  CHECK(a.cells_failed == 0);
  const std::string records = text::ReadFile(dir.File("full/records.csv"));
  CHECK(std::count(records.begin(), records.end(), '\n') == 1 + 4 * 5);
  for (const char* f : {"records.csv", "splits.csv", "summary_by_size.csv", "tables.md", "manifest_syn.csv"}) {
    CHECK(std::filesystem::exists(dir.File(std::string("full/") + f)));
  }

  const RunResult again = RunBenchmark(full);
  CHECK(again.cells_reused == 4);
  CHECK(text::ReadFile(dir.File("full/records.csv")) == records);

  const BenchConfig resumed = SmallSynthetic(dir.File("resumed"));
  RunOptions stop;
  stop.max_new_cells = 1;
  CHECK(RunBenchmark(resumed, stop).interrupted);
  {
    std::ofstream torn(dir.File("resumed/records.csv"), std::ios::app);
    torn << "syn,25,0,fus";
  }
  const RunResult finished = RunBenchmark(resumed);
  CHECK(finished.cells_reused == 1);
  CHECK(finished.cells_computed == 3);
  CHECK(text::ReadFile(dir.File("resumed/records.csv")) == records);

  BenchConfig changed = SmallSynthetic(dir.File("full"));
  changed.seeds = {0, 1, 2};
  CHECK_THROWS_WITH(RunBenchmark(changed), doctest::Contains("different configuration"));
}

TEST_CASE("a gbdt-only run needs no score file") {
  TempDir dir;
  std::string csv = "a,b,y\n";
  for (int i = 0; i < 120; ++i) {
    csv += std::to_string(i % 17) + "," + std::to_string((i * 7) % 11) + "," + (i % 17 > 8 ? "yes" : "no") + "\n";
  }
  dir.Write("d.csv", csv);
  BenchConfig c = ParseConfig(
      "sizes = 10\nseeds = 0\nmethods = gbdt\nbudget_gbdt = 2\nbudget_scale = 1\nbudget_baseline = 3\n"
      "[dataset d]\ndata = d.csv\ntarget = y\n",
      dir.path());
  c.output = dir.File("out");
  const RunResult r = RunBenchmark(c);
  REQUIRE(r.report.records.size() == 1);
  CHECK(r.report.records[0].method == MethodTag::kGbdt);
  const std::string tables = text::ReadFile(dir.File("out/tables.md"));
  CHECK(tables.find("fused") == std::string::npos);
  CHECK(tables.find("prior") == std::string::npos);
}

}  // namespace
}  // namespace priorboost::bench
