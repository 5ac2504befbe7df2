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

// Second-order gradient boosted decision trees with exact greedy split
// enumeration and an arbitrary per-row, per-class base margin.
//
// The base margin is the starting point of boosting. A plain model starts from
// zeros; a prior-seeded model starts from scaled transformer scores. Trees
// never modify the base margin, and prediction adds it back unchanged:
//
//   margin(row) = base(row) + sum over trees of learning_rate * leaf(row)
//
// Sums are accumulated in tree order both during training and prediction, so
// a model's training-time margins and its predictions agree bit for bit.

#ifndef PRIORBOOST_GBDT_GBDT_HPP_
#define PRIORBOOST_GBDT_GBDT_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"

namespace priorboost::gbdt {

enum class Objective { kBinaryLogistic, kMulticlassSoftmax };

const char* ToString(Objective objective);
Objective ParseObjective(const std::string& name);
// Binary for two classes, softmax otherwise.
Objective ObjectiveFor(std::size_t n_classes);
// Number of margin columns: 1 for binary, K for softmax.
std::size_t MarginWidth(Objective objective, std::size_t n_classes);

struct GbdtParams {
  int max_depth = 6;
  double min_child_weight = 1.0;  // minimum Hessian sum per child
  double subsample = 1.0;
  double learning_rate = 0.3;
  double colsample_bylevel = 1.0;
  double colsample_bytree = 1.0;
  double gamma = 0.0;   // split penalty
  double lambda = 1.0;  // L2 on leaf weights
  double alpha = 0.0;   // L1 on leaf weights
  int num_rounds = 20;
  // Leaf-wise growth cap; 0 grows depth-wise to max_depth.
  int max_leaves = 0;
  // Minimum row count per child; 0 disables.
  int min_child_samples = 0;
  // Row subsample is redrawn every bagging_freq rounds.
  int bagging_freq = 1;

  void Validate() const;
  // Space-separated key=value list; FromString accepts the same form.
  std::string ToString() const;
  static GbdtParams FromString(const std::string& text);
};

// Leaf-or-internal node in a flat arena. Children are arena indices.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool default_left = true;
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaf value before learning-rate scaling
  double gain = 0.0;    // split gain of internal nodes

  bool IsLeaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  // Leaf value reached by a row; missing values follow default_left.
  double LeafValue(std::span<const double> row) const;
  int Depth() const;
};

struct TreeRecord {
  int round = 0;
  int class_index = 0;
  Tree tree;
};

// Row-major n_rows x width matrix of raw margins.
struct MarginMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  MarginMatrix() = default;
  MarginMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  // Rows picked by index, in order.
  MarginMatrix Gather(std::span<const std::size_t> indices) const;
  void Validate() const;
};

enum class BaseMarginKind { kConstant, kExternal };

struct Ensemble {
  std::vector<TreeRecord> trees;
  std::size_t n_classes = 2;
  std::size_t n_features = 0;
  Objective objective = Objective::kBinaryLogistic;
  GbdtParams params;
  BaseMarginKind base_margin_kind = BaseMarginKind::kConstant;
  std::vector<double> constant_margin;  // per margin column, for kConstant

  std::size_t MarginWidth() const { return gbdt::MarginWidth(objective, n_classes); }
  // Margins a constant-base model starts from, for n rows.
  MarginMatrix ConstantMargins(std::size_t n_rows) const;
  void Validate() const;
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
  double gain = 0.0;
  double grad_left = 0.0;
  double hess_left = 0.0;
  double grad_right = 0.0;
  double hess_right = 0.0;
};

// Read-only row-major view of a feature matrix.
struct FeatureView {
  std::span<const double> values;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;

  double At(std::size_t row, std::size_t feature) const { return values[row * n_features + feature]; }
  static FeatureView Of(const data::Dataset& dataset) {
    return {dataset.features, dataset.n_rows, dataset.n_features};
  }
};

// ½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − (G_L+G_R)²/(H_L+H_R+λ)] − γ
double SplitGain(double grad_left, double hess_left, double grad_right, double hess_right,
                 double lambda, double gamma);

// −sign(G)·max(|G| − α, 0)/(H + λ). Throws when H + λ = 0.
double LeafWeight(double grad_sum, double hess_sum, double lambda, double alpha);

// Best positive-gain split over the candidate features, or nullopt. Scans
// midpoints of consecutive distinct values; missing rows are tried on both
// sides. Ties go to the lower feature index, then the lower threshold.
std::optional<SplitCandidate> FindBestSplit(const FeatureView& features,
                                            std::span<const std::uint32_t> rows,
                                            std::span<const double> grads,
                                            std::span<const double> hess,
                                            std::span<const int> candidate_features,
                                            const GbdtParams& params);

struct TrainOptions {
  std::uint64_t seed = 0;
  // Called after each round with the current training margins.
  std::function<void(int round, const MarginMatrix& margins)> on_round;
};

// Trains on every row of `dataset`. base_margins must have one row per
// dataset row and MarginWidth(objective, K) columns.
Ensemble Train(const data::Dataset& dataset, const GbdtParams& params,
               const MarginMatrix& base_margins, Objective objective,
               BaseMarginKind base_kind, const TrainOptions& options);

MarginMatrix PredictMargin(const Ensemble& ensemble, const FeatureView& features,
                           const MarginMatrix& base_margins);

// n x K probabilities. Binary margins produce [1 − p, p].
MarginMatrix PredictProba(const MarginMatrix& margins, Objective objective);

// Per-class ranking scores that are strictly increasing in the class
// probability but do not saturate: the margin itself for binary, the
// log-softmax for multiclass. Returned as n x K (binary: [−m, m]).
MarginMatrix RankingScores(const MarginMatrix& margins, Objective objective);

// Mean negative log-likelihood of labels under the margins.
double LogLoss(const MarginMatrix& margins, std::span<const int> labels, Objective objective);

std::string SaveEnsemble(const Ensemble& ensemble);
Ensemble LoadEnsemble(const std::string& text);

}  // namespace priorboost::gbdt

#endif  // PRIORBOOST_GBDT_GBDT_HPP_
