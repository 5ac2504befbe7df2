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

#include "baselines/baselines.hpp"
#include "common/error.hpp"
#include "doctest.h"
#include "fusion/fusion.hpp"
#include "metrics/metrics.hpp"
#include "synthetic/synthetic.hpp"
#include "test_util.hpp"

namespace priorboost::fusion {
namespace {

using testing::TempDir;

PriorScores Raw(const std::vector<std::vector<double>>& rows) {
  PriorScores p;
  p.scores = gbdt::MarginMatrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.row_ids.push_back(static_cast<data::RowId>(i));
    for (std::size_t c = 0; c < rows[i].size(); ++c) p.scores.at(i, c) = rows[i][c];
  }
  for (std::size_t c = 0; c < rows[0].size(); ++c) p.class_labels.push_back("c" + std::to_string(c));
  return p;
}

struct Fixture {
  synth::Generated g;
  PriorScores centered;
  data::SplitSpec split;
};

Fixture MakeFixture(std::size_t n_classes, std::uint64_t seed, double quality = 0.9) {
  synth::SyntheticSpec spec;
  spec.n_rows = 400;
  spec.n_classes = n_classes;
  Fixture f{synth::Generate(spec, seed), {}, {}};
  f.centered = CenterScores(synth::MakePrior(f.g.true_logits, f.g.dataset.row_ids,
                                             f.g.dataset.schema.class_labels, quality, seed + 100));
  const data::NominalSize sizes[] = {50};
  const std::uint64_t seeds[] = {seed};
  f.split = data::MakeSplits(f.g.dataset, sizes, seeds).splits.at(0);
  return f;
}

TEST_CASE("row centering examples") {
  const PriorScores c = CenterScores(Raw({{2.0, 4.0}, {0, 0}, {0, 0}}));
  CHECK(c.scores.at(0, 0) == -1.0);
  CHECK(c.scores.at(0, 1) == 1.0);
  CHECK(c.scores.at(1, 0) == 0.0);
  CHECK(c.centered);
  const PriorScores t = CenterScores(Raw({{-1.5, 0.5, 4.0}}));
  CHECK(t.scores.values == std::vector<double>{-2.5, -0.5, 3.0});
  CHECK_THROWS_AS(CenterScores(c), Error);
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("column centering subtracts per-class means") {
  const PriorScores c = CenterScores(Raw({{1.0, 4.0}, {3.0, 0.0}}), CenteringAxis::kColumn);
  CHECK(c.scores.values == std::vector<double>{-1.0, 2.0, 1.0, -2.0});
  const gbdt::MarginMatrix m = ScoresToMargins(c, ScaleParam(1.0), gbdt::Objective::kBinaryLogistic);
  CHECK(m.at(0, 0) == 1.5);
  CHECK(m.at(1, 0) == -1.5);
}

TEST_CASE("per-row constant shifts leave margins unchanged") {
  const PriorScores a = CenterScores(Raw({{0.25, 1.5, -2.0}}));
  const PriorScores b = CenterScores(Raw({{10.25, 11.5, 8.0}}));
  const auto ma = ScoresToMargins(a, ScaleParam(3.0), gbdt::Objective::kMulticlassSoftmax);
  const auto mb = ScoresToMargins(b, ScaleParam(3.0), gbdt::Objective::kMulticlassSoftmax);
  for (std::size_t c = 0; c < 3; ++c) CHECK(ma.at(0, c) == doctest::Approx(mb.at(0, c)).epsilon(1e-12));
}

TEST_CASE("scores to margins") {
  const PriorScores c = CenterScores(Raw({{-1.0, 1.0}}));
  CHECK(ScoresToMargins(c, ScaleParam(2.0), gbdt::Objective::kBinaryLogistic).at(0, 0) == 2.0);
  CHECK(ScoresToMargins(c, ScaleParam(0.0), gbdt::Objective::kBinaryLogistic).at(0, 0) == 0.0);
  const PriorScores m = CenterScores(Raw({{1.0, 2.0, 6.0}, {0.5, 0.0, -0.5}}));
  const auto one = ScoresToMargins(m, ScaleParam(1.5), gbdt::Objective::kMulticlassSoftmax);
  const auto two = ScoresToMargins(m, ScaleParam(3.0), gbdt::Objective::kMulticlassSoftmax);
  for (std::size_t i = 0; i < one.values.size(); ++i) CHECK(two.values[i] == 2.0 * one.values[i]);
  CHECK_THROWS_AS(ScoresToMargins(m, ScaleParam(1.0), gbdt::Objective::kBinaryLogistic), Error);
  CHECK_THROWS_AS(ScoresToMargins(Raw({{1.0, 2.0}}), ScaleParam(1.0), gbdt::Objective::kBinaryLogistic),
                  Error);
}

TEST_CASE("scale range") {
  CHECK_NOTHROW(ScaleParam(0.0));
  CHECK_NOTHROW(ScaleParam(1e-4));
  CHECK_NOTHROW(ScaleParam(1e4));
  CHECK_THROWS_AS(ScaleParam(1e-5), Error);
  CHECK_THROWS_AS(ScaleParam(2e4), Error);
  CHECK_THROWS_AS(ScaleParam(-1.0), Error);
}

TEST_CASE("score file round trip keeps full precision") {
  TempDir dir;
  PriorScores raw = Raw({{0.1, 1.0 / 3.0}, {-2.5e-300, 7.123456789012345}});
  raw.source = PriorSource::kTabpfn;
  raw.model = "tabpfn v2 base";
  const std::string path = dir.File("scores.csv");
  WriteScoreFile(raw, path);
  const PriorScores back = ReadScoreFile(path, raw.class_labels);
  CHECK(back.scores.values == raw.scores.values);
  CHECK(back.row_ids == raw.row_ids);
  CHECK(back.source == PriorSource::kTabpfn);
  CHECK(back.model == "tabpfn v2 base");
  CHECK(back.Hash() == raw.Hash());

  const std::vector<std::string> swapped = {"c1", "c0"};
  CHECK_THROWS_WITH(ReadScoreFile(path, swapped), doctest::Contains("class names"));
  CHECK_THROWS_AS(WriteScoreFile(CenterScores(raw), path), Error);
}

TEST_CASE("malformed score files are rejected") {
  TempDir dir;
  const std::vector<std::string> labels = {"a", "b"};
  CHECK_THROWS_AS(ReadScoreFile(dir.Write("1.csv", "id,a,b\n0,1,2\n"), labels), Error);
  CHECK_THROWS_AS(ReadScoreFile(dir.Write("2.csv", "row_id,a,b\n0,1\n"), labels), Error);
  CHECK_THROWS_AS(ReadScoreFile(dir.Write("3.csv", "row_id,a,b\n0,1,nan\n"), labels), Error);
  CHECK_THROWS_AS(ReadScoreFile(dir.Write("4.csv", "row_id,a,b\n0,1,2\n0,3,4\n"), labels), Error);
  CHECK_THROWS_AS(ReadScoreFile(dir.Write("5.csv", "row_id,a,b\nx,1,2\n"), labels), Error);
}

TEST_CASE("s = 0 matches the plain booster bit for bit") {
  for (std::size_t k : {2u, 3u}) {
    const Fixture f = MakeFixture(k, 5);
    gbdt::GbdtParams p;
    p.subsample = 0.8;
    p.colsample_bytree = 0.7;
    const FusedModel fused = TrainFused(f.g.dataset, f.split, f.centered, ScaleParam(0.0), p, 42);
    const gbdt::Objective objective = gbdt::ObjectiveFor(k);
    const data::Dataset train = f.g.dataset.Subset(f.split.train_ids);
    gbdt::TrainOptions options;
    options.seed = 42;
    const gbdt::Ensemble plain =
        gbdt::Train(train, p, gbdt::MarginMatrix(train.n_rows, gbdt::MarginWidth(objective, k)), objective,
                    gbdt::BaseMarginKind::kConstant, options);
    const data::Dataset test = f.g.dataset.Subset(f.split.test_ids);
    const auto plain_p = gbdt::PredictProba(
        gbdt::PredictMargin(plain, gbdt::FeatureView::Of(test), plain.ConstantMargins(test.n_rows)), objective);
    const auto fused_p = PredictFused(fused, f.g.dataset, f.split.test_ids, f.centered);
    CHECK(fused_p.values == plain_p.values);
  }
}

TEST_CASE("zero trees reproduce the prior ranking") {
  const Fixture f = MakeFixture(2, 6);
  gbdt::GbdtParams p;
  p.num_rounds = 0;
  const data::Dataset test = f.g.dataset.Subset(f.split.test_ids);
  const auto objective = gbdt::Objective::kBinaryLogistic;
  const double prior_auc =
      metrics::AucBinary(ScoresToMargins(f.centered, ScaleParam(1.0), objective).Gather(
                             f.centered.Lookup(f.split.test_ids)).values,
                         test.labels);
  for (double s : {1e-4, 1.0, 1e4}) {
    const FusedModel m = TrainFused(f.g.dataset, f.split, f.centered, ScaleParam(s), p, 0);
    const auto margins = PredictFusedMargin(m, f.g.dataset, f.split.test_ids, f.centered);
    const double auc = metrics::AucMulticlass(gbdt::RankingScores(margins, objective), test.labels).value;
    CHECK(std::abs(auc - prior_auc) <= 1e-12);
  }
}

TEST_CASE("zero trees keep the prior argmax for multiclass") {
  const Fixture f = MakeFixture(3, 6);
  gbdt::GbdtParams p;
  p.num_rounds = 0;
  for (double s : {1e-4, 1.0, 1e4}) {
    const FusedModel m = TrainFused(f.g.dataset, f.split, f.centered, ScaleParam(s), p, 0);
    const auto proba = PredictFused(m, f.g.dataset, f.split.test_ids, f.centered);
    const auto rows = f.centered.Lookup(f.split.test_ids);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto argmax = [](auto begin, auto end) { return std::max_element(begin, end) - begin; };
      const auto* prior_row = &f.centered.scores.values[rows[i] * 3];
      const auto* fused_row = &proba.values[i * 3];
      CHECK(argmax(prior_row, prior_row + 3) == argmax(fused_row, fused_row + 3));
    }
  }
}

TEST_CASE("a treeless binary model outputs sigmoid of the margin") {
  data::Dataset ds;
  ds.n_rows = 1;
  ds.n_features = 1;
  ds.features = {0.0};
  ds.labels = {1};
  ds.row_ids = {0};
  ds.schema.columns = {{"x", data::ColumnKind::kNumeric}, {"y", data::ColumnKind::kCategorical}};
  ds.schema.target = "y";
  ds.schema.class_labels = {"c0", "c1"};
  ds.category_maps.assign(1, std::nullopt);
  const PriorScores c = CenterScores(Raw({{-1.0, 1.0}}));
  FusedModel m;
  m.ensemble.base_margin_kind = gbdt::BaseMarginKind::kExternal;
  m.ensemble.n_features = 1;
  m.scale = ScaleParam(1.0);
  m.prior_hash = c.Hash();
  m.class_labels = ds.schema.class_labels;
  const std::vector<data::RowId> ids = {0};
  CHECK(PredictFused(m, ds, ids, c).at(0, 1) == doctest::Approx(0.73106).epsilon(1e-5));
}

TEST_CASE("fused prediction is row-wise and checks its prior") {
  const Fixture f = MakeFixture(2, 7);
  const FusedModel m = TrainFused(f.g.dataset, f.split, f.centered, ScaleParam(2.0), gbdt::GbdtParams{}, 1);
  std::vector<data::RowId> ids(f.split.test_ids.begin(), f.split.test_ids.begin() + 10);
  std::vector<data::RowId> reversed(ids.rbegin(), ids.rend());
  const auto a = PredictFused(m, f.g.dataset, ids, f.centered);
  const auto b = PredictFused(m, f.g.dataset, reversed, f.centered);
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(a.at(i, 1) == b.at(ids.size() - 1 - i, 1));

  PriorScores partial = f.centered;
  partial.row_ids.resize(10);
  partial.scores.values.resize(10 * 2);
  partial.scores.rows = 10;
  CHECK_THROWS_WITH(TrainFused(f.g.dataset, f.split, partial, ScaleParam(1.0), gbdt::GbdtParams{}, 1),
                    doctest::Contains("uncovered rows"));

  PriorScores other = f.centered;
  other.scores.at(0, 0) += 1.0;
  other.scores.at(0, 1) -= 1.0;
  CHECK_THROWS_WITH(PredictFused(m, f.g.dataset, ids, other), doctest::Contains("do not match"));
}

TEST_CASE("fused models save and load exactly") {
  const Fixture f = MakeFixture(3, 8);
  const FusedModel m = TrainFused(f.g.dataset, f.split, f.centered, ScaleParam(0.37), gbdt::GbdtParams{}, 3);
  const FusedModel back = LoadFusedModel(SaveFusedModel(m));
  CHECK(back.scale.value() == m.scale.value());
  CHECK(back.prior_hash == m.prior_hash);
  CHECK(PredictFused(back, f.g.dataset, f.split.test_ids, f.centered).values ==
        PredictFused(m, f.g.dataset, f.split.test_ids, f.centered).values);
  CHECK_THROWS_AS(LoadFusedModel(gbdt::SaveEnsemble(m.ensemble)), Error);
}

}  // namespace
}  // namespace priorboost::fusion

namespace priorboost::baselines {
namespace {

TEST_CASE("selection picks the higher validation AUC, GBDT on ties") {
  CHECK(SelectBest(0.75, 0.80) == metrics::MethodTag::kPrior);
  CHECK(SelectBest(0.80, 0.75) == metrics::MethodTag::kGbdt);
  CHECK(SelectBest(0.80, 0.80) == metrics::MethodTag::kGbdt);
  CHECK_THROWS_AS(SelectBest(1.2, 0.5), Error);
}

TEST_CASE("stacking appends centered score columns") {
  synth::SyntheticSpec spec;
  spec.n_rows = 60;
  spec.n_features = 3;
  spec.n_informative = 2;
  const synth::Generated g = synth::Generate(spec, 1);
  const fusion::PriorScores raw =
      synth::MakePrior(g.true_logits, g.dataset.row_ids, g.dataset.schema.class_labels, 0.5, 2);
  const fusion::PriorScores c = fusion::CenterScores(raw);
  const data::Dataset stacked = StackFeatures(g.dataset, c);
  REQUIRE(stacked.n_features == 5);
  CHECK(stacked.schema.FeatureColumns()[3].name == std::string(kStackedPrefix) + g.dataset.schema.class_labels[0]);
  CHECK(stacked.labels == g.dataset.labels);
  for (std::size_t i = 0; i < stacked.n_rows; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(stacked.At(i, j) == g.dataset.At(i, j));
    CHECK(stacked.At(i, 3) == c.scores.at(i, 0));
    CHECK(stacked.At(i, 4) == c.scores.at(i, 1));
  }
  CHECK_THROWS_AS(StackFeatures(g.dataset, raw), Error);
  CHECK_THROWS_WITH(StackFeatures(stacked, c), doctest::Contains("collision"));
}

TEST_CASE("stacking all-zero scores trains the plain model") {
  synth::SyntheticSpec spec;
  spec.n_rows = 150;
  const synth::Generated g = synth::Generate(spec, 2);
  fusion::PriorScores zero;
  zero.row_ids = g.dataset.row_ids;
  zero.class_labels = g.dataset.schema.class_labels;
  zero.scores = gbdt::MarginMatrix(g.dataset.n_rows, 2);
  const data::Dataset stacked = StackFeatures(g.dataset, fusion::CenterScores(zero));
  gbdt::GbdtParams p;
  gbdt::TrainOptions options;
  options.seed = 5;
  const auto plain = gbdt::Train(g.dataset, p, gbdt::MarginMatrix(150, 1), gbdt::Objective::kBinaryLogistic,
                                 gbdt::BaseMarginKind::kConstant, options);
  const auto wide = gbdt::Train(stacked, p, gbdt::MarginMatrix(150, 1), gbdt::Objective::kBinaryLogistic,
                                gbdt::BaseMarginKind::kConstant, options);
  const auto a = gbdt::PredictMargin(plain, gbdt::FeatureView::Of(g.dataset), gbdt::MarginMatrix(150, 1));
  const auto b = gbdt::PredictMargin(wide, gbdt::FeatureView::Of(stacked), gbdt::MarginMatrix(150, 1));
  CHECK(a.values == b.values);
}

}  // namespace
}  // namespace priorboost::baselines
