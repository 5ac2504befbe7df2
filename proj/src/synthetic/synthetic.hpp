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

// Linear-logit synthetic classification tasks with a tunable-quality prior,
// standing in for transformer scores in tests and desk-scale benchmarks.

#ifndef PRIORBOOST_SYNTHETIC_SYNTHETIC_HPP_
#define PRIORBOOST_SYNTHETIC_SYNTHETIC_HPP_

#include <cstdint>
#include <string>

#include "dataset/dataset.hpp"
#include "fusion/fusion.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::synth {

struct SyntheticSpec {
  std::size_t n_rows = 1000;
  std::size_t n_features = 8;
  std::size_t n_informative = 4;
  std::size_t n_classes = 2;
  std::uint64_t weight_seed = 0;
  double label_noise = 0.0;    // probability a label is replaced by another class
  double prior_quality = 1.0;  // fraction of the true logit kept in the prior

  void Validate() const;
  // Comma-separated key=value form, as used in benchmark configs.
  std::string ToString() const;
  static SyntheticSpec FromString(const std::string& text);
};

struct Generated {
  data::Dataset dataset;
  gbdt::MarginMatrix true_logits;  // n x K
};

// Features ~ N(0, 1); logits = X[:, :n_informative] · W with W ~ N(0, 1)
// drawn from weight_seed; labels ~ softmax(logits), then flipped with
// probability label_noise.
Generated Generate(const SyntheticSpec& spec, std::uint64_t seed);

// score = q · true_logit + (1 − q) · N(0, 1), per row and class; raw.
fusion::PriorScores MakePrior(const gbdt::MarginMatrix& true_logits,
                              const std::vector<data::RowId>& row_ids,
                              const std::vector<std::string>& class_labels, double quality,
                              std::uint64_t noise_seed);

// Writes the dataset as CSV (features f0.., target "label").
void WriteCsv(const data::Dataset& dataset, const std::string& path);

}  // namespace priorboost::synth

#endif  // PRIORBOOST_SYNTHETIC_SYNTHETIC_HPP_
