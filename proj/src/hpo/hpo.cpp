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

#include "hpo/hpo.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/text.hpp"
#include "metrics/metrics.hpp"

namespace priorboost::hpo {

double Distribution::Sample(Rng& rng) const {
  switch (kind) {
    case DistKind::kUniformInt:
      return lo + static_cast<double>(rng.Below(static_cast<std::uint64_t>(hi - lo) + 1));
    case DistKind::kUniform:
      return lo + (hi - lo) * rng.Uniform();
    case DistKind::kLogUniform:
      return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.Uniform());
    case DistKind::kMaybeZeroLogUniform:
      if (rng.Uniform() < 0.5) return 0.0;
      return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.Uniform());
  }
  return lo;
}

double Get(const Assignment& assignment, const std::string& name) {
  for (const auto& [key, value] : assignment) {
    if (key == name) return value;
  }
  Fail(ErrorCode::kNotFound, "parameter not in assignment: " + name);
}

const char* ToString(EngineStyle style) {
  return style == EngineStyle::kXgboost ? "xgboost_style" : "lightgbm_style";
}

EngineStyle ParseEngineStyle(const std::string& name) {
  if (name == "xgboost_style") return EngineStyle::kXgboost;
  if (name == "lightgbm_style") return EngineStyle::kLightgbm;
  Fail(ErrorCode::kParse, "unknown engine space: " + name);
}

void SearchSpace::Validate() const {
  for (const Distribution& d : params) {
    Check(d.lo <= d.hi, ErrorCode::kInvalidArgument, "bounds reversed for " + d.name);
    if (d.kind == DistKind::kLogUniform || d.kind == DistKind::kMaybeZeroLogUniform) {
      Check(d.lo > 0.0, ErrorCode::kInvalidArgument, "log-uniform bounds must be positive: " + d.name);
    }
    if (d.kind == DistKind::kUniformInt) {
      Check(d.lo == std::floor(d.lo) && d.hi == std::floor(d.hi), ErrorCode::kInvalidArgument,
            "integer bounds required: " + d.name);
    }
  }
}

Assignment SearchSpace::Sample(Rng& rng) const {
  Assignment out;
  out.reserve(params.size() + fixed.size());
  for (const Distribution& d : params) out.emplace_back(d.name, d.Sample(rng));
  for (const auto& f : fixed) out.push_back(f);
  return out;
}

gbdt::GbdtParams SearchSpace::ToParams(const Assignment& a) const {
  gbdt::GbdtParams p;
  if (style == EngineStyle::kXgboost) {
    p.max_depth = static_cast<int>(Get(a, "max_depth"));
    p.min_child_weight = Get(a, "min_child_weight");
    p.subsample = Get(a, "subsample");
    p.learning_rate = Get(a, "learning_rate");
    p.colsample_bylevel = Get(a, "colsample_bylevel");
    p.colsample_bytree = Get(a, "colsample_bytree");
    p.gamma = Get(a, "gamma");
    p.lambda = Get(a, "lambda");
    p.alpha = Get(a, "alpha");
    p.num_rounds = static_cast<int>(Get(a, "num_rounds"));
  } else {
    p.max_depth = 64;
    p.max_leaves = static_cast<int>(Get(a, "num_leaves"));
    p.colsample_bytree = Get(a, "feature_fraction");
    p.subsample = Get(a, "bagging_fraction");
    p.bagging_freq = static_cast<int>(Get(a, "bagging_freq"));
    p.min_child_samples = static_cast<int>(Get(a, "min_child_samples"));
    p.alpha = Get(a, "lambda_l1");
    p.lambda = Get(a, "lambda_l2");
    p.learning_rate = Get(a, "learning_rate");
    p.min_child_weight = Get(a, "min_sum_hessian_in_leaf");
    p.gamma = 0.0;
    p.num_rounds = static_cast<int>(Get(a, "num_rounds"));
  }
  p.Validate();
  return p;
}

SearchSpace SearchSpace::XgboostStyle() {
  SearchSpace s;
  s.style = EngineStyle::kXgboost;
  s.params = {
      {"max_depth", DistKind::kUniformInt, 3, 10},
      {"min_child_weight", DistKind::kLogUniform, 1e-8, 1e5},
      {"subsample", DistKind::kUniform, 0.5, 1.0},
      {"learning_rate", DistKind::kLogUniform, 1e-5, 1.0},
      {"colsample_bylevel", DistKind::kUniform, 0.5, 1.0},
      {"colsample_bytree", DistKind::kUniform, 0.5, 1.0},
      {"gamma", DistKind::kMaybeZeroLogUniform, 1e-8, 1e2},
      {"lambda", DistKind::kMaybeZeroLogUniform, 1e-8, 1e2},
      {"alpha", DistKind::kMaybeZeroLogUniform, 1e-8, 1e2},
  };
  s.fixed = {{"num_rounds", 20}};
  return s;
}

SearchSpace SearchSpace::LightgbmStyle() {
  SearchSpace s;
  s.style = EngineStyle::kLightgbm;
  s.params = {
      {"num_leaves", DistKind::kUniformInt, 2, 256},
      {"feature_fraction", DistKind::kUniform, 0.4, 1.0},
      {"bagging_fraction", DistKind::kUniform, 0.4, 1.0},
      {"bagging_freq", DistKind::kUniformInt, 1, 7},
      {"min_child_samples", DistKind::kUniformInt, 5, 100},
      {"lambda_l1", DistKind::kMaybeZeroLogUniform, 1e-8, 10},
      {"lambda_l2", DistKind::kMaybeZeroLogUniform, 1e-8, 10},
  };
  // Not searched; LightGBM's own defaults.
  s.fixed = {{"num_rounds", 100}, {"learning_rate", 0.1}, {"min_sum_hessian_in_leaf", 1e-3}};
  return s;
}

SearchSpace SearchSpace::For(EngineStyle style) {
  return style == EngineStyle::kXgboost ? XgboostStyle() : LightgbmStyle();
}

Distribution ScaleDistribution() {
  return {"scale", DistKind::kMaybeZeroLogUniform, fusion::ScaleParam::kMin, fusion::ScaleParam::kMax};
}

const Trial& StudyResult::Best() const {
  Check(best >= 0, ErrorCode::kFailedPrecondition, "study has no successful trial");
  return trials[static_cast<std::size_t>(best)];
}

std::string StudyResult::Log() const {
  std::ostringstream out;
  out << "trial,param_json,val_auc\n";
  for (const Trial& t : trials) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.params) params[key] = value;
    if (t.scale) params["scale"] = *t.scale;
    params["seed"] = t.seed;
    out << t.index << "," << text::CsvField(params.dump()) << ","
        << (t.failed ? std::string("failed") : text::FormatDouble(t.val_auc)) << "\n";
  }
  return out.str();
}

void SelectBest(StudyResult& study) {
  study.best = -1;
  for (std::size_t i = 0; i < study.trials.size(); ++i) {
    const Trial& t = study.trials[i];
    if (t.failed) continue;
    if (study.best < 0) {
      study.best = static_cast<int>(i);
      continue;
    }
    const Trial& b = study.trials[static_cast<std::size_t>(study.best)];
    if (t.val_auc > b.val_auc || (t.val_auc == b.val_auc && t.val_loss < b.val_loss)) {
      study.best = static_cast<int>(i);
    }
  }
  if (study.best < 0) {
    const std::string first = study.trials.empty() ? std::string("no trials") : study.trials.front().error;
    Fail(ErrorCode::kFailedPrecondition, "all trials failed (first error: " + first + ")");
  }
}

StudyResult Prefix(const StudyResult& study, std::size_t budget) {
  Check(budget >= 1 && budget <= study.trials.size(), ErrorCode::kInvalidArgument,
        "prefix budget out of range");
  StudyResult out;
  out.trials.assign(study.trials.begin(), study.trials.begin() + static_cast<std::ptrdiff_t>(budget));
  SelectBest(out);
  return out;
}

std::uint64_t TrialModelSeed(std::uint64_t study_seed, int trial_index) {
  return DeriveSeed(study_seed, static_cast<std::uint64_t>(trial_index), 0x3ede1);
}

namespace {

struct Score {
  double auc = 0.0;
  double loss = 0.0;
};

Score ScoreRows(const gbdt::Ensemble& model, const data::Dataset& rows, const gbdt::MarginMatrix& base) {
  const gbdt::MarginMatrix margins = gbdt::PredictMargin(model, gbdt::FeatureView::Of(rows), base);
  return {metrics::AucMulticlass(gbdt::RankingScores(margins, model.objective), rows.labels).value,
          gbdt::LogLoss(margins, rows.labels, model.objective)};
}

Score TrainAndScore(const data::Dataset& train, const data::Dataset& val,
                     const gbdt::GbdtParams& params, const gbdt::MarginMatrix& train_base,
                     const gbdt::MarginMatrix& val_base, gbdt::BaseMarginKind kind,
                     std::uint64_t model_seed) {
  gbdt::TrainOptions options;
  options.seed = model_seed;
  const gbdt::Objective objective = gbdt::ObjectiveFor(train.NumClasses());
  const gbdt::Ensemble model = gbdt::Train(train, params, train_base, objective, kind, options);
  return ScoreRows(model, val, val_base);
}

struct PreparedSplit {
  data::Dataset train;
  data::Dataset val;
  gbdt::MarginMatrix train_base;
  gbdt::MarginMatrix val_base;
  gbdt::BaseMarginKind kind = gbdt::BaseMarginKind::kConstant;
};

PreparedSplit Prepare(const data::Dataset& dataset, const data::SplitSpec& split,
                      const gbdt::MarginMatrix& base_margins) {
  PreparedSplit p;
  p.train = dataset.Subset(split.train_ids);
  p.val = dataset.Subset(split.val_ids);
  const std::size_t width = gbdt::MarginWidth(gbdt::ObjectiveFor(dataset.NumClasses()), dataset.NumClasses());
  if (base_margins.rows == 0) {
    p.train_base = gbdt::MarginMatrix(p.train.n_rows, width);
    p.val_base = gbdt::MarginMatrix(p.val.n_rows, width);
    return p;
  }
  Check(base_margins.rows == dataset.n_rows && base_margins.cols == width, ErrorCode::kInvalidArgument,
        "base margins are not aligned to the dataset");
  p.train_base = base_margins.Gather(dataset.IndicesOf(split.train_ids));
  p.val_base = base_margins.Gather(dataset.IndicesOf(split.val_ids));
  p.kind = gbdt::BaseMarginKind::kExternal;
  return p;
}

}  // namespace

double ValidationAuc(const data::Dataset& dataset, const data::SplitSpec& split,
                     const gbdt::GbdtParams& params, const gbdt::MarginMatrix& base_margins,
                     std::uint64_t model_seed) {
  const PreparedSplit p = Prepare(dataset, split, base_margins);
  return TrainAndScore(p.train, p.val, params, p.train_base, p.val_base, p.kind, model_seed).auc;
}

StudyResult TuneGbdt(const data::Dataset& dataset, const data::SplitSpec& split,
                     const SearchSpace& space, int budget, const gbdt::MarginMatrix& base_margins,
                     const TuneOptions& options) {
  Check(budget >= 1, ErrorCode::kInvalidArgument, "budget must be >= 1");
  space.Validate();
  const PreparedSplit p = Prepare(dataset, split, base_margins);

  StudyResult study;
  study.trials.resize(static_cast<std::size_t>(budget));
  ParallelFor(study.trials.size(), options.workers, [&](std::size_t i) {
    Trial& t = study.trials[i];
    t.index = static_cast<int>(i);
    Rng rng(DeriveSeed(options.seed, i, 0x9a7a));
    t.params = space.Sample(rng);
    t.seed = TrialModelSeed(options.seed, t.index);
    try {
      const Score score = TrainAndScore(p.train, p.val, space.ToParams(t.params), p.train_base,
                                        p.val_base, p.kind, t.seed);
      t.val_auc = score.auc;
      t.val_loss = score.loss;
    } catch (const Error& e) {
      t.failed = true;
      t.error = e.what();
    }
  });
  SelectBest(study);
  return study;
}

ScaleStudy TuneScale(const data::Dataset& dataset, const data::SplitSpec& split,
                     const fusion::PriorScores& centered, const gbdt::GbdtParams& fixed_params,
                     std::uint64_t model_seed, int budget, const TuneOptions& options) {
  Check(budget >= 1, ErrorCode::kInvalidArgument, "budget must be >= 1");
  Check(centered.centered, ErrorCode::kFailedPrecondition, "prior scores must be centered first");
  fixed_params.Validate();
  const gbdt::Objective objective = gbdt::ObjectiveFor(dataset.NumClasses());
  const data::Dataset train = dataset.Subset(split.train_ids);
  const data::Dataset val = dataset.Subset(split.val_ids);
  centered.Lookup(split.test_ids);
  const Distribution scale_dist = ScaleDistribution();

  ScaleStudy result;
  StudyResult& study = result.study;
  study.trials.resize(static_cast<std::size_t>(budget));
  ParallelFor(study.trials.size(), options.workers, [&](std::size_t i) {
    Trial& t = study.trials[i];
    t.index = static_cast<int>(i);
    t.seed = model_seed;
    double s = 0.0;
    if (i > 0) {
      Rng rng(DeriveSeed(options.seed, i, 0x5ca1e));
      s = scale_dist.Sample(rng);
    }
    t.scale = s;
    try {
      const fusion::ScaleParam scale(s);
      const gbdt::MarginMatrix train_base = fusion::MarginsForRows(centered, scale, objective, split.train_ids);
      const gbdt::MarginMatrix val_base = fusion::MarginsForRows(centered, scale, objective, split.val_ids);
      const Score score = TrainAndScore(train, val, fixed_params, train_base, val_base,
                                        gbdt::BaseMarginKind::kExternal, model_seed);
      t.val_auc = score.auc;
      t.val_loss = score.loss;
    } catch (const Error& e) {
      t.failed = true;
      t.error = e.what();
    }
  });
  SelectBest(study);
  result.best = fusion::ScaleParam(*study.Best().scale);
  return result;
}

}  // namespace priorboost::hpo
