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


// Declarative benchmark configuration: global `key = value` lines followed by
// `[dataset NAME]` sections. Relative paths resolve against the config file.
//
//   sizes = 10,25,50,100,250
//   seeds = 0,1,2,3,4
//   [dataset heart]
//   data = heart.csv
//   scores = heart_tabpfn.csv
//   target = HeartDisease
//   test_size = 184
//
// A section may instead hold `synthetic = <spec>` and `seed = N`, in which
// case the rows and the prior are generated in memory.

#ifndef PRIORBOOST_BENCH_CONFIG_HPP_
#define PRIORBOOST_BENCH_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "fusion/fusion.hpp"
#include "hpo/hpo.hpp"
#include "metrics/metrics.hpp"
#include "synthetic/synthetic.hpp"

namespace priorboost::bench {

struct DatasetEntry {
  std::string name;
  std::string data_path;
  std::string scores_path;  // empty when no method needs a prior
  std::string target;
  std::optional<std::size_t> test_size;
  std::optional<synth::SyntheticSpec> synthetic;
  std::uint64_t synthetic_seed = 0;
};

struct BenchConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<data::NominalSize> sizes = {10, 25, 50, 100, 250};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int budget_gbdt = 100;
  int budget_scale = 30;
  int budget_baseline = 130;
  hpo::EngineStyle space = hpo::EngineStyle::kXgboost;
  std::vector<metrics::MethodTag> methods = {std::begin(metrics::kAllMethods),
                                             std::end(metrics::kAllMethods)};
  std::string output = "bench_out";
  fusion::CenteringAxis centering = fusion::CenteringAxis::kRow;
  bool shuffle_headers = false;
  std::uint64_t shuffle_seed = 0;
  std::size_t workers = 1;
  double test_fraction = 0.2;

  bool Wants(metrics::MethodTag method) const;
  // True when any requested method consumes prior scores.
  bool NeedsPrior() const;

  // Budgets positive and balanced (gbdt + scale == baseline), methods known,
  // dataset names unique, every dataset has a source, and a score file
  // wherever a prior is needed.
  void Validate() const;

  // Applies one `key=value` override. Dataset keys use `dataset.NAME.key`.
  void Set(const std::string& assignment, const std::string& base_dir = "");

  // Canonical text form; parsing it yields an equal configuration.
  std::string ToText() const;
};

BenchConfig ParseConfig(const std::string& text, const std::string& base_dir);
BenchConfig LoadConfig(const std::string& path);

}  // namespace priorboost::bench

#endif  // PRIORBOOST_BENCH_CONFIG_HPP_
