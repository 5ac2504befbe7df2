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
#include <cmath>
#include <numeric>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::gbdt {

const char* ToString(Objective objective) {
  return objective == Objective::kBinaryLogistic ? "binary_logistic" : "multiclass_softmax";
}

Objective ParseObjective(const std::string& name) {
  if (name == "binary_logistic") return Objective::kBinaryLogistic;
  if (name == "multiclass_softmax") return Objective::kMulticlassSoftmax;
  Fail(ErrorCode::kParse, "unknown objective: " + name);
}

Objective ObjectiveFor(std::size_t n_classes) {
  Check(n_classes >= 2, ErrorCode::kInvalidArgument, "need at least two classes");
  return n_classes == 2 ? Objective::kBinaryLogistic : Objective::kMulticlassSoftmax;
}

std::size_t MarginWidth(Objective objective, std::size_t n_classes) {
  return objective == Objective::kBinaryLogistic ? 1 : n_classes;
}

void GbdtParams::Validate() const {
  const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  Check(max_depth >= 1 && max_depth <= 64, ErrorCode::kInvalidArgument, "max_depth must lie in [1, 64]");
  Check(min_child_weight >= 0.0, ErrorCode::kInvalidArgument, "min_child_weight must be >= 0");
  Check(subsample > 0.0 && subsample <= 1.0, ErrorCode::kInvalidArgument, "subsample must lie in (0, 1]");
  Check(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorCode::kInvalidArgument,
        "learning_rate must be positive");
  Check(colsample_bylevel > 0.0 && in(colsample_bylevel, 0.0, 1.0), ErrorCode::kInvalidArgument,
        "colsample_bylevel must lie in (0, 1]");
  Check(colsample_bytree > 0.0 && in(colsample_bytree, 0.0, 1.0), ErrorCode::kInvalidArgument,
        "colsample_bytree must lie in (0, 1]");
  Check(gamma >= 0.0 && lambda >= 0.0 && alpha >= 0.0, ErrorCode::kInvalidArgument,
        "gamma, lambda and alpha must be >= 0");
  Check(num_rounds >= 0, ErrorCode::kInvalidArgument, "num_rounds must be >= 0");
  Check(max_leaves == 0 || max_leaves >= 2, ErrorCode::kInvalidArgument, "max_leaves must be 0 or >= 2");
  Check(min_child_samples >= 0, ErrorCode::kInvalidArgument, "min_child_samples must be >= 0");
  Check(bagging_freq >= 1, ErrorCode::kInvalidArgument, "bagging_freq must be >= 1");
}

std::string GbdtParams::ToString() const {
  std::ostringstream out;
  out << "max_depth=" << max_depth << " min_child_weight=" << text::FormatDouble(min_child_weight)
      << " subsample=" << text::FormatDouble(subsample)
      << " learning_rate=" << text::FormatDouble(learning_rate)
      << " colsample_bylevel=" << text::FormatDouble(colsample_bylevel)
      << " colsample_bytree=" << text::FormatDouble(colsample_bytree)
      << " gamma=" << text::FormatDouble(gamma) << " lambda=" << text::FormatDouble(lambda)
      << " alpha=" << text::FormatDouble(alpha) << " num_rounds=" << num_rounds
      << " max_leaves=" << max_leaves << " min_child_samples=" << min_child_samples
      << " bagging_freq=" << bagging_freq;
  return out.str();
}

GbdtParams GbdtParams::FromString(const std::string& s) {
  GbdtParams p;
  std::istringstream in(s);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    Check(eq != std::string::npos, ErrorCode::kParse, "bad parameter token: " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    const auto real = [&] {
      const auto v = text::ParseDouble(value);
      Check(v.has_value(), ErrorCode::kParse, "bad value for " + key + ": " + value);
      return *v;
    };
    const auto integer = [&] {
      const auto v = text::ParseInt(value);
      Check(v.has_value(), ErrorCode::kParse, "bad value for " + key + ": " + value);
      return static_cast<int>(*v);
    };
    if (key == "max_depth") p.max_depth = integer();
    else if (key == "min_child_weight") p.min_child_weight = real();
    else if (key == "subsample") p.subsample = real();
    else if (key == "learning_rate") p.learning_rate = real();
    else if (key == "colsample_bylevel") p.colsample_bylevel = real();
    else if (key == "colsample_bytree") p.colsample_bytree = real();
    else if (key == "gamma") p.gamma = real();
    else if (key == "lambda") p.lambda = real();
    else if (key == "alpha") p.alpha = real();
    else if (key == "num_rounds") p.num_rounds = integer();
    else if (key == "max_leaves") p.max_leaves = integer();
    else if (key == "min_child_samples") p.min_child_samples = integer();
    else if (key == "bagging_freq") p.bagging_freq = integer();
    else Fail(ErrorCode::kParse, "unknown parameter: " + key);
  }
  p.Validate();
  return p;
}

double Tree::LeafValue(std::span<const double> row) const {
  int index = 0;
  while (true) {
    const TreeNode& node = nodes[static_cast<std::size_t>(index)];
    if (node.IsLeaf()) return node.weight;
    const double v = row[static_cast<std::size_t>(node.feature)];
    const bool go_left = data::IsMissing(v) ? node.default_left : v < node.threshold;
    index = go_left ? node.left : node.right;
  }
}

int Tree::Depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.IsLeaf()) continue;
    for (int child : {n.left, n.right}) {
      depth[static_cast<std::size_t>(child)] = depth[i] + 1;
      deepest = std::max(deepest, depth[i] + 1);
    }
  }
  return deepest;
}

MarginMatrix MarginMatrix::Gather(std::span<const std::size_t> indices) const {
  MarginMatrix out(indices.size(), cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(indices[i] * cols), cols,
                out.values.begin() + static_cast<std::ptrdiff_t>(i * cols));
  }
  return out;
}

void MarginMatrix::Validate() const {
  Check(values.size() == rows * cols, ErrorCode::kInvalidArgument, "margin matrix shape mismatch");
  for (double v : values) {
    Check(std::isfinite(v), ErrorCode::kInvalidArgument, "non-finite margin");
  }
}

MarginMatrix Ensemble::ConstantMargins(std::size_t n_rows) const {
  MarginMatrix m(n_rows, MarginWidth());
  if (constant_margin.empty()) return m;
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = constant_margin[c];
  }
  return m;
}

void Ensemble::Validate() const {
  params.Validate();
  Check(n_classes >= 2 && n_classes <= data::kMaxClasses, ErrorCode::kInvalidArgument,
        "class count out of range");
  Check(objective == ObjectiveFor(n_classes), ErrorCode::kInvalidArgument,
        "objective does not match class count");
  const std::size_t width = MarginWidth();
  Check(trees.size() % width == 0, ErrorCode::kInvalidArgument,
        "tree count is not a multiple of the margin width");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const TreeRecord& rec = trees[t];
    Check(rec.round == static_cast<int>(t / width) && rec.class_index == static_cast<int>(t % width),
          ErrorCode::kInvalidArgument, "trees are not in round-major order");
    const auto& nodes = rec.tree.nodes;
    Check(!nodes.empty(), ErrorCode::kInvalidArgument, "empty tree");
    for (const TreeNode& n : nodes) {
      if (n.IsLeaf()) {
        Check(std::isfinite(n.weight), ErrorCode::kInvalidArgument, "non-finite leaf weight");
        continue;
      }
      Check(n.feature < static_cast<int>(n_features), ErrorCode::kInvalidArgument,
            "feature index out of range");
      Check(n.left > 0 && n.right > 0 && static_cast<std::size_t>(n.left) < nodes.size() &&
                static_cast<std::size_t>(n.right) < nodes.size(),
            ErrorCode::kInvalidArgument, "child index out of range");
    }
  }
  if (base_margin_kind == BaseMarginKind::kConstant) {
    Check(constant_margin.empty() || constant_margin.size() == width, ErrorCode::kInvalidArgument,
          "constant margin width mismatch");
  }
}

namespace {

double Sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

constexpr double kHessianFloor = 1e-16;

// Gradients and Hessians of the log loss at the current margins, stored
// class-major: grads[c * n + i].
void ComputeGradients(const MarginMatrix& margins, std::span<const int> labels,
                      Objective objective, std::vector<double>& grads,
                      std::vector<double>& hess) {
  const std::size_t n = margins.rows;
  const std::size_t width = margins.cols;
  if (objective == Objective::kBinaryLogistic) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(margins.at(i, 0));
      grads[i] = p - (labels[i] == 1 ? 1.0 : 0.0);
      hess[i] = std::max(p * (1.0 - p), kHessianFloor);
    }
    return;
  }
  std::vector<double> prob(width);
  for (std::size_t i = 0; i < n; ++i) {
    double top = margins.at(i, 0);
    for (std::size_t c = 1; c < width; ++c) top = std::max(top, margins.at(i, c));
    double total = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      prob[c] = std::exp(margins.at(i, c) - top);
      total += prob[c];
    }
    for (std::size_t c = 0; c < width; ++c) {
      const double p = prob[c] / total;
      grads[c * n + i] = p - (labels[i] == static_cast<int>(c) ? 1.0 : 0.0);
      hess[c * n + i] = std::max(p * (1.0 - p), kHessianFloor);
    }
  }
}

std::vector<int> SampleFeatures(std::span<const int> pool, double fraction, Rng& rng) {
  std::vector<int> out(pool.begin(), pool.end());
  if (fraction >= 1.0) return out;
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(out.size()))));
  rng.Shuffle(out);
  out.resize(std::min(keep, out.size()));
  std::sort(out.begin(), out.end());
  return out;
}

class TreeGrower {
 public:
  TreeGrower(const FeatureView& features, std::span<const double> grads,
             std::span<const double> hess, const GbdtParams& params,
             std::vector<std::vector<int>> level_features)
      : features_(features),
        grads_(grads),
        hess_(hess),
        params_(params),
        level_features_(std::move(level_features)) {}

  Tree Grow(std::vector<std::uint32_t> rows) {
    rows_ = std::move(rows);
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    if (params_.max_leaves > 0) {
      GrowLeafWise();
    } else {
      GrowDepthWise(0, 0, rows_.size(), 0);
    }
    return std::move(tree_);
  }

 private:
  struct OpenLeaf {
    int node;
    std::size_t begin;
    std::size_t end;
    int depth;
    std::optional<SplitCandidate> split;
  };

  std::span<const std::uint32_t> Range(std::size_t begin, std::size_t end) const {
    return std::span<const std::uint32_t>(rows_).subspan(begin, end - begin);
  }

  std::optional<SplitCandidate> Evaluate(std::size_t begin, std::size_t end, int depth) const {
    if (depth >= params_.max_depth) return std::nullopt;
    return FindBestSplit(features_, Range(begin, end), grads_, hess_,
                         level_features_[static_cast<std::size_t>(depth)], params_);
  }

  void MakeLeaf(int node, std::size_t begin, std::size_t end) {
    double g = 0.0;
    double h = 0.0;
    for (std::uint32_t r : Range(begin, end)) {
      g += grads_[r];
      h += hess_[r];
    }
    TreeNode& n = tree_.nodes[static_cast<std::size_t>(node)];
    n.feature = -1;
    n.weight = LeafWeight(g, h, params_.lambda, params_.alpha);
  }

  // Partitions rows [begin, end) by the split, stably; returns the boundary.
  std::size_t Partition(const SplitCandidate& split, std::size_t begin, std::size_t end) {
    const auto first = rows_.begin() + static_cast<std::ptrdiff_t>(begin);
    const auto last = rows_.begin() + static_cast<std::ptrdiff_t>(end);
    const auto mid = std::stable_partition(first, last, [&](std::uint32_t r) {
      const double v = features_.At(r, static_cast<std::size_t>(split.feature));
      return data::IsMissing(v) ? split.default_left : v < split.threshold;
    });
    return static_cast<std::size_t>(mid - rows_.begin());
  }

  std::pair<int, int> Attach(int node, const SplitCandidate& split) {
    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    TreeNode& n = tree_.nodes[static_cast<std::size_t>(node)];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.default_left = split.default_left;
    n.gain = split.gain;
    n.left = left;
    n.right = left + 1;
    return {left, left + 1};
  }

  void GrowDepthWise(int node, std::size_t begin, std::size_t end, int depth) {
    const auto split = Evaluate(begin, end, depth);
    if (!split) {
      MakeLeaf(node, begin, end);
      return;
    }
    const std::size_t mid = Partition(*split, begin, end);
    const auto [left, right] = Attach(node, *split);
    GrowDepthWise(left, begin, mid, depth + 1);
    GrowDepthWise(right, mid, end, depth + 1);
  }

  // Best-first: repeatedly split the open leaf with the largest gain (lowest
  // node index on ties) until max_leaves is reached.
  void GrowLeafWise() {
    std::vector<OpenLeaf> open;
    open.push_back({0, 0, rows_.size(), 0, Evaluate(0, rows_.size(), 0)});
    int leaves = 1;
    while (leaves < params_.max_leaves) {
      auto best = open.end();
      for (auto it = open.begin(); it != open.end(); ++it) {
        if (!it->split) continue;
        if (best == open.end() || it->split->gain > best->split->gain ||
            (it->split->gain == best->split->gain && it->node < best->node)) {
          best = it;
        }
      }
      if (best == open.end()) break;
      const OpenLeaf leaf = *best;
      open.erase(best);
      const std::size_t mid = Partition(*leaf.split, leaf.begin, leaf.end);
      const auto [left, right] = Attach(leaf.node, *leaf.split);
      open.push_back({left, leaf.begin, mid, leaf.depth + 1, Evaluate(leaf.begin, mid, leaf.depth + 1)});
      open.push_back({right, mid, leaf.end, leaf.depth + 1, Evaluate(mid, leaf.end, leaf.depth + 1)});
      ++leaves;
    }
    for (const OpenLeaf& leaf : open) MakeLeaf(leaf.node, leaf.begin, leaf.end);
  }

  const FeatureView& features_;
  std::span<const double> grads_;
  std::span<const double> hess_;
  const GbdtParams& params_;
  std::vector<std::vector<int>> level_features_;
  std::vector<std::uint32_t> rows_;
  Tree tree_;
};

void CheckFeatures(const data::Dataset& dataset) {
  for (double v : dataset.features) {
    Check(data::IsMissing(v) || std::isfinite(v), ErrorCode::kInvalidArgument,
          "non-finite feature value");
  }
}

}  // namespace

Ensemble Train(const data::Dataset& dataset, const GbdtParams& params,
               const MarginMatrix& base_margins, Objective objective, BaseMarginKind base_kind,
               const TrainOptions& options) {
  params.Validate();
  Check(dataset.n_rows > 0, ErrorCode::kInvalidArgument, "empty training set");
  Check(objective == ObjectiveFor(dataset.NumClasses()), ErrorCode::kInvalidArgument,
        "objective does not match class count");
  const std::size_t n = dataset.n_rows;
  const std::size_t width = MarginWidth(objective, dataset.NumClasses());
  Check(base_margins.rows == n && base_margins.cols == width, ErrorCode::kInvalidArgument,
        "base margins must be " + std::to_string(n) + " x " + std::to_string(width));
  base_margins.Validate();
  CheckFeatures(dataset);

  Ensemble ensemble;
  ensemble.n_classes = dataset.NumClasses();
  ensemble.n_features = dataset.n_features;
  ensemble.objective = objective;
  ensemble.params = params;
  ensemble.base_margin_kind = base_kind;
  if (base_kind == BaseMarginKind::kConstant) {
    ensemble.constant_margin.assign(width, 0.0);
    if (n > 0) {
      for (std::size_t c = 0; c < width; ++c) ensemble.constant_margin[c] = base_margins.at(0, c);
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        Check(base_margins.at(r, c) == ensemble.constant_margin[c], ErrorCode::kInvalidArgument,
              "constant base margin varies across rows");
      }
    }
  }

  const FeatureView view = FeatureView::Of(dataset);
  std::vector<int> all_features(dataset.n_features);
  std::iota(all_features.begin(), all_features.end(), 0);

  MarginMatrix margins = base_margins;
  std::vector<double> grads(n * width);
  std::vector<double> hess(n * width);
  std::vector<std::uint32_t> sample;

  for (int round = 0; round < params.num_rounds; ++round) {
    ComputeGradients(margins, dataset.labels, objective, grads, hess);

    if (params.subsample >= 1.0) {
      sample.resize(n);
      std::iota(sample.begin(), sample.end(), 0u);
    } else if (round % params.bagging_freq == 0) {
      Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(round), 0));
      sample.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.Uniform() < params.subsample) sample.push_back(static_cast<std::uint32_t>(i));
      }
      if (sample.empty()) sample.push_back(static_cast<std::uint32_t>(rng.Below(n)));
    }

    for (std::size_t c = 0; c < width; ++c) {
      Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(round), c + 1));
      const std::vector<int> tree_features = SampleFeatures(all_features, params.colsample_bytree, rng);
      std::vector<std::vector<int>> level_features;
      const int levels = std::min(params.max_depth, 64);
      level_features.reserve(static_cast<std::size_t>(levels));
      for (int d = 0; d < levels; ++d) {
        level_features.push_back(SampleFeatures(tree_features, params.colsample_bylevel, rng));
      }

      const std::span<const double> class_grads(grads.data() + c * n, n);
      const std::span<const double> class_hess(hess.data() + c * n, n);
      TreeGrower grower(view, class_grads, class_hess, params, std::move(level_features));
      TreeRecord record{round, static_cast<int>(c), grower.Grow(sample)};

      for (std::size_t i = 0; i < n; ++i) {
        margins.at(i, c) += params.learning_rate * record.tree.LeafValue(dataset.Row(i));
      }
      ensemble.trees.push_back(std::move(record));
    }
    if (options.on_round) options.on_round(round, margins);
  }
  return ensemble;
}

MarginMatrix PredictMargin(const Ensemble& ensemble, const FeatureView& features,
                           const MarginMatrix& base_margins) {
  const std::size_t width = ensemble.MarginWidth();
  Check(base_margins.rows == features.n_rows && base_margins.cols == width,
        ErrorCode::kInvalidArgument, "base margins are not aligned to the rows");
  Check(features.n_features == ensemble.n_features, ErrorCode::kInvalidArgument,
        "feature index out of range: model expects " + std::to_string(ensemble.n_features) +
            " features, rows have " + std::to_string(features.n_features));
  MarginMatrix out = base_margins;
  const double lr = ensemble.params.learning_rate;
  for (const TreeRecord& rec : ensemble.trees) {
    const auto c = static_cast<std::size_t>(rec.class_index);
    for (std::size_t i = 0; i < features.n_rows; ++i) {
      const std::span<const double> row = features.values.subspan(i * features.n_features, features.n_features);
      out.at(i, c) += lr * rec.tree.LeafValue(row);
    }
  }
  return out;
}

MarginMatrix PredictProba(const MarginMatrix& margins, Objective objective) {
  if (objective == Objective::kBinaryLogistic) {
    Check(margins.cols == 1, ErrorCode::kInvalidArgument, "binary margins must have one column");
    MarginMatrix out(margins.rows, 2);
    for (std::size_t i = 0; i < margins.rows; ++i) {
      const double p = Sigmoid(margins.at(i, 0));
      out.at(i, 0) = 1.0 - p;
      out.at(i, 1) = p;
    }
    return out;
  }
  MarginMatrix out(margins.rows, margins.cols);
  for (std::size_t i = 0; i < margins.rows; ++i) {
    double top = margins.at(i, 0);
    for (std::size_t c = 1; c < margins.cols; ++c) top = std::max(top, margins.at(i, c));
    double total = 0.0;
    for (std::size_t c = 0; c < margins.cols; ++c) {
      out.at(i, c) = std::exp(margins.at(i, c) - top);
      total += out.at(i, c);
    }
    for (std::size_t c = 0; c < margins.cols; ++c) out.at(i, c) /= total;
  }
  return out;
}

MarginMatrix RankingScores(const MarginMatrix& margins, Objective objective) {
  if (objective == Objective::kBinaryLogistic) {
    MarginMatrix out(margins.rows, 2);
    for (std::size_t i = 0; i < margins.rows; ++i) {
      out.at(i, 0) = -margins.at(i, 0);
      out.at(i, 1) = margins.at(i, 0);
    }
    return out;
  }
  MarginMatrix out(margins.rows, margins.cols);
  for (std::size_t i = 0; i < margins.rows; ++i) {
    double top = margins.at(i, 0);
    for (std::size_t c = 1; c < margins.cols; ++c) top = std::max(top, margins.at(i, c));
    double total = 0.0;
    for (std::size_t c = 0; c < margins.cols; ++c) total += std::exp(margins.at(i, c) - top);
    const double log_norm = top + std::log(total);
    for (std::size_t c = 0; c < margins.cols; ++c) out.at(i, c) = margins.at(i, c) - log_norm;
  }
  return out;
}

double LogLoss(const MarginMatrix& margins, std::span<const int> labels, Objective objective) {
  Check(labels.size() == margins.rows && margins.rows > 0, ErrorCode::kInvalidArgument,
        "labels are not aligned to margins");
  // log(1 + e^x) without overflow.
  const auto softplus = [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
  double total = 0.0;
  if (objective == Objective::kBinaryLogistic) {
    for (std::size_t i = 0; i < margins.rows; ++i) {
      const double m = margins.at(i, 0);
      total += labels[i] == 1 ? softplus(-m) : softplus(m);
    }
  } else {
    const MarginMatrix log_prob = RankingScores(margins, objective);
    for (std::size_t i = 0; i < margins.rows; ++i) {
      total -= log_prob.at(i, static_cast<std::size_t>(labels[i]));
    }
  }
  return total / static_cast<double>(margins.rows);
}

}  // namespace priorboost::gbdt
