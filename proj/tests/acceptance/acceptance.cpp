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


// Acceptance suite. Prints one PASS/FAIL line per criterion followed by the
// measurements behind it, then a summary. The exit status is the number of
// failed criteria; with --gate exact only the exact and invariant criteria
// count, while the two statistical reproduction criteria are still reported.
//
// Usage: acceptance [--gate exact] [scratch dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bench/config.hpp"
#include "bench/runner.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "fusion/fusion.hpp"
#include "gbdt/gbdt.hpp"
#include "hpo/hpo.hpp"
#include "metrics/metrics.hpp"
#include "oracles.hpp"
#include "synthetic/synthetic.hpp"

namespace pb = priorboost;
namespace fs = std::filesystem;
using pb::metrics::MethodTag;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  bool statistical = false;
};

std::string Fixed(double v, int decimals = 4) { return pb::text::FormatFixed(v, decimals); }

struct Problem {
  pb::synth::Generated g;
  pb::fusion::PriorScores centered;
  pb::data::SplitSpec split;
};

Problem RandomProblem(pb::Rng& rng, std::size_t n_classes) {
  pb::synth::SyntheticSpec spec;
  spec.n_rows = 150 + rng.Below(250);
  spec.n_features = 2 + rng.Below(8);
  spec.n_informative = 1 + rng.Below(spec.n_features);
  spec.n_classes = n_classes;
  spec.weight_seed = rng.NextU64();
  spec.label_noise = 0.1 * rng.Uniform();
  const std::uint64_t seed = rng.NextU64();
  Problem p{pb::synth::Generate(spec, seed), {}, {}};
  p.centered = pb::fusion::CenterScores(pb::synth::MakePrior(p.g.true_logits, p.g.dataset.row_ids,
                                                             p.g.dataset.schema.class_labels, rng.Uniform(),
                                                             seed ^ 0x51));
  const pb::data::NominalSize sizes[] = {static_cast<pb::data::NominalSize>(20 + rng.Below(40))};
  const std::uint64_t seeds[] = {seed};
  p.split = pb::data::MakeSplits(p.g.dataset, sizes, seeds).splits.at(0);
  return p;
}

Outcome ScaleZeroEquivalence() {
  pb::Rng rng(2026);
  const pb::hpo::SearchSpace space = pb::hpo::SearchSpace::XgboostStyle();
  int identical = 0;
  for (int t = 0; t < 20; ++t) {
    const Problem p = RandomProblem(rng, 2 + rng.Below(3));
    const pb::gbdt::GbdtParams params = space.ToParams(space.Sample(rng));
    const std::uint64_t seed = rng.NextU64();
    const pb::fusion::FusedModel fused =
        pb::fusion::TrainFused(p.g.dataset, p.split, p.centered, pb::fusion::ScaleParam(0.0), params, seed);
    const auto objective = pb::gbdt::ObjectiveFor(p.g.dataset.NumClasses());
    const std::size_t width = pb::gbdt::MarginWidth(objective, p.g.dataset.NumClasses());
    const pb::data::Dataset train = p.g.dataset.Subset(p.split.train_ids);
    pb::gbdt::TrainOptions options;
    options.seed = seed;
    const pb::gbdt::Ensemble plain = pb::gbdt::Train(train, params, pb::gbdt::MarginMatrix(train.n_rows, width),
                                                     objective, pb::gbdt::BaseMarginKind::kConstant, options);
    const pb::data::Dataset test = p.g.dataset.Subset(p.split.test_ids);
    const auto a = pb::gbdt::PredictProba(
        pb::gbdt::PredictMargin(plain, pb::gbdt::FeatureView::Of(test), plain.ConstantMargins(test.n_rows)),
        objective);
    const auto b = pb::fusion::PredictFused(fused, p.g.dataset, p.split.test_ids, p.centered);
    if (a.values.size() == b.values.size() &&
        std::equal(a.values.begin(), a.values.end(), b.values.begin(),
                   [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); })) {
      ++identical;
    }
  }
  return {identical == 20, std::to_string(identical) + "/20 triples bit-identical"};
}

Outcome ZeroRoundInvariance() {
  pb::Rng rng(7);
  double worst = 0.0;
  int argmax_mismatch = 0;
  int binary_cases = 0;
  int multi_cases = 0;
  pb::gbdt::GbdtParams params;
  params.num_rounds = 0;
  for (int t = 0; t < 8; ++t) {
    const std::size_t k = t < 5 ? 2 : 3 + static_cast<std::size_t>(t % 3);
    const Problem p = RandomProblem(rng, k);
    const auto objective = pb::gbdt::ObjectiveFor(k);
    const pb::data::Dataset test = p.g.dataset.Subset(p.split.test_ids);
    const auto positions = p.centered.Lookup(p.split.test_ids);
    for (double s : {1e-4, 1.0, 1e4}) {
      const auto model =
          pb::fusion::TrainFused(p.g.dataset, p.split, p.centered, pb::fusion::ScaleParam(s), params, 0);
      const auto margins = pb::fusion::PredictFusedMargin(model, p.g.dataset, p.split.test_ids, p.centered);
      if (k == 2) {
        ++binary_cases;
        std::vector<double> prior(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) prior[i] = p.centered.scores.at(positions[i], 1);
        const double prior_auc = pb::metrics::AucBinary(prior, test.labels);
        const double fused_auc =
            pb::metrics::AucMulticlass(pb::gbdt::RankingScores(margins, objective), test.labels).value;
        worst = std::max(worst, std::abs(prior_auc - fused_auc));
      } else {
        ++multi_cases;
        for (std::size_t i = 0; i < positions.size(); ++i) {
          const double* pr = &p.centered.scores.values[positions[i] * k];
          const double* fr = &margins.values[i * k];
          if (std::max_element(pr, pr + k) - pr != std::max_element(fr, fr + k) - fr) ++argmax_mismatch;
        }
      }
    }
  }
  std::ostringstream d;
  d << "binary: max |fused AUC - prior AUC| = " << worst << " over " << binary_cases
    << " (dataset, s) pairs; multiclass: " << argmax_mismatch << " argmax mismatches over " << multi_cases
    << " pairs";
  return {worst <= 1e-12 && argmax_mismatch == 0, d.str()};
}

Outcome AucOracle() {
  pb::Rng rng(11);
  double worst = 0.0;
  int tied = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.Below(199);
    const std::uint64_t levels = t % 2 == 0 ? 1 + rng.Below(10) : 1000000;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.Below(levels)) / static_cast<double>(levels);
      labels[i] = static_cast<int>(rng.Below(2));
    }
    labels[0] = 0;
    labels[n - 1] = 1;
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++tied;
    worst = std::max(worst, std::abs(pb::metrics::AucBinary(scores, labels) - pb::oracle::PairwiseAuc(scores, labels)));
  }
  return {worst <= 1e-12, "max deviation " + pb::text::FormatDouble(worst) + " over 200 instances (" +
                              std::to_string(tied) + " with ties)"};
}

Outcome SplitOracle() {
  pb::Rng rng(13);
  int agree = 0;
  int with_split = 0;
  int exact_ties = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.Below(64);
    const std::size_t f = 5;
    std::vector<double> values(n * f);
    for (double& v : values) {
      v = rng.Uniform() < 0.1 ? pb::data::kMissing : static_cast<double>(rng.Below(8)) * 0.5;
    }
    // Dyadic statistics keep every sum exact, so equal gains are truly equal.
    std::vector<double> grads(n), hess(n);
    for (std::size_t i = 0; i < n; ++i) {
      grads[i] = (static_cast<double>(rng.Below(9)) - 4.0) / 4.0;
      hess[i] = static_cast<double>(1 + rng.Below(4)) / 4.0;
    }
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);
    std::vector<int> features(f);
    std::iota(features.begin(), features.end(), 0);
    pb::gbdt::GbdtParams p;
    p.lambda = static_cast<double>(rng.Below(3)) * 0.5;
    p.gamma = static_cast<double>(rng.Below(2)) * 0.25;
    p.min_child_weight = static_cast<double>(rng.Below(3)) * 0.25;
    const pb::gbdt::FeatureView view{values, n, f};
    const auto got = pb::gbdt::FindBestSplit(view, rows, grads, hess, features, p);
    const auto want = pb::oracle::ExhaustiveSplit(view, rows, grads, hess, features, p);
    bool same = got.has_value() == want.has_value();
    if (same && got) {
      ++with_split;
      same = got->feature == want->feature && got->threshold == want->threshold &&
             got->default_left == want->default_left && got->gain == want->gain;
      // Count nodes where another feature reaches the same best gain.
      for (int other = 0; other < static_cast<int>(f); ++other) {
        if (other == want->feature) continue;
        const std::vector<int> single = {other};
        const auto alt = pb::oracle::ExhaustiveSplit(view, rows, grads, hess, single, p);
        if (alt && alt->gain == want->gain) {
          ++exact_ties;
          break;
        }
      }
    }
    if (same) ++agree;
  }
  return {agree == 100, std::to_string(agree) + "/100 nodes agree (" + std::to_string(with_split) +
                            " with a split, " + std::to_string(exact_ties) + " with cross-feature gain ties)"};
}

Outcome SamplerStatistics() {
  const pb::hpo::SearchSpace space = pb::hpo::SearchSpace::XgboostStyle();
  pb::Rng rng(17);
  std::size_t zeros = 0;
  bool depth_in_range = true;
  std::vector<double> rates;
  for (int i = 0; i < 10000; ++i) {
    const auto a = space.Sample(rng);
    const double depth = pb::hpo::Get(a, "max_depth");
    depth_in_range = depth_in_range && depth >= 3 && depth <= 10 && depth == std::floor(depth);
    if (pb::hpo::Get(a, "gamma") == 0.0) ++zeros;
    rates.push_back(pb::hpo::Get(a, "learning_rate"));
  }
  std::nth_element(rates.begin(), rates.begin() + 5000, rates.end());
  const double median = rates[5000];
  const double analytic = std::pow(10.0, -2.5);
  const double zero_fraction = static_cast<double>(zeros) / 10000.0;
  const bool pass = std::abs(zero_fraction - 0.5) <= 0.02 && depth_in_range && median >= analytic / 2 &&
                    median <= analytic * 2;
  return {pass, "gamma zero fraction " + Fixed(zero_fraction) + ", max_depth in [3,10]: " +
                    (depth_in_range ? "yes" : "no") + ", learning_rate median " + pb::text::FormatDouble(median) +
                    " (analytic " + pb::text::FormatDouble(analytic) + ")"};
}

Outcome MetricsFixtures() {
  const auto z = pb::metrics::ZScores(std::vector<double>{0.8, 0.9, 1.0});
  const bool z_ok = std::abs(z[0] + 1.2247) <= 1e-4 && std::abs(z[1]) <= 1e-4 && std::abs(z[2] - 1.2247) <= 1e-4;
  const bool ranks_ok = pb::metrics::Ranks(std::vector<double>{0.9, 0.7, 0.8}) == std::vector<double>{1, 3, 2} &&
                        pb::metrics::Ranks(std::vector<double>{0.9, 0.7, 0.9}) == std::vector<double>{1.5, 3, 1.5} &&
                        pb::metrics::Ranks(std::vector<double>{0.5, 0.5, 0.5}) == std::vector<double>{2, 2, 2};
  const auto report = pb::metrics::Aggregate({
      {"abalone", pb::data::kFullSize, 0, MethodTag::kGbdt, 0.8454, 0.8454},
      {"abalone", pb::data::kFullSize, 0, MethodTag::kFused, 0.8559, 0.8559},
  });
  const auto& s = report.sizes.at(0);
  const bool agg_ok = s.mean_rank == std::vector<double>{2, 1} && s.mean_z == std::vector<double>{-1, 1};
  return {z_ok && ranks_ok && agg_ok, "zscores [" + Fixed(z[0]) + ", " + Fixed(z[1]) + ", " + Fixed(z[2]) +
                                          "], ranks " + (ranks_ok ? "match" : "differ") +
                                          ", Abalone FULL ranks gbdt " + Fixed(s.mean_rank[0], 1) + " / fused " +
                                          Fixed(s.mean_rank[1], 1)};
}

Outcome MonotoneLoss() {
  pb::Rng rng(19);
  int monotone = 0;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Problem p = RandomProblem(rng, 2 + rng.Below(4));
    const pb::data::Dataset& ds = p.g.dataset;
    pb::gbdt::GbdtParams params;
    params.max_depth = 1 + static_cast<int>(rng.Below(8));
    params.learning_rate = 0.05 + 0.95 * rng.Uniform();
    params.lambda = rng.Uniform() < 0.5 ? 0.0 : std::exp(rng.Normal());
    params.alpha = rng.Uniform() < 0.5 ? 0.0 : 0.1 * rng.Uniform();
    params.gamma = rng.Uniform() < 0.5 ? 0.0 : 0.1 * rng.Uniform();
    params.min_child_weight = rng.Uniform() < 0.5 ? 0.0 : rng.Uniform();
    params.num_rounds = 10 + static_cast<int>(rng.Below(20));
    const auto objective = pb::gbdt::ObjectiveFor(ds.NumClasses());
    const pb::gbdt::MarginMatrix base(ds.n_rows, pb::gbdt::MarginWidth(objective, ds.NumClasses()));
    double previous = pb::gbdt::LogLoss(base, ds.labels, objective);
    double increase = 0.0;
    pb::gbdt::TrainOptions options;
    options.seed = rng.NextU64();
    options.on_round = [&](int, const pb::gbdt::MarginMatrix& m) {
      const double loss = pb::gbdt::LogLoss(m, ds.labels, objective);
      increase = std::max(increase, loss - previous);
      previous = loss;
    };
    pb::gbdt::Train(ds, params, base, objective, pb::gbdt::BaseMarginKind::kConstant, options);
    worst = std::max(worst, increase);
    if (increase <= 1e-9) ++monotone;
  }
  return {monotone == 50, std::to_string(monotone) + "/50 configurations monotone, largest per-round increase " +
                              pb::text::FormatDouble(worst)};
}

// ---- benchmark-level criteria -------------------------------------------

pb::bench::BenchConfig DominanceConfig(const std::string& output) {
  pb::bench::BenchConfig c = pb::bench::ParseConfig(
      "sizes = 10,25,50,100,250\n"
      "seeds = 0,1,2,3,4\n"
      "budget_gbdt = 100\n"
      "budget_scale = 30\n"
      "budget_baseline = 130\n"
      "[dataset synthetic]\n"
      "synthetic = n_rows=2000,n_features=8,n_informative=4,classes=2,weight_seed=0,quality=0.9\n"
      "seed = 0\n",
      "");
  c.output = output;
  return c;
}

std::size_t MethodIndex(const pb::metrics::SizeSummary& s, MethodTag m) {
  return static_cast<std::size_t>(std::find(s.methods.begin(), s.methods.end(), m) - s.methods.begin());
}

Outcome FusionDominance(const pb::metrics::AggregateReport& r) {
  bool pass = true;
  std::ostringstream d;
  for (const auto& s : r.sizes) {
    const double fused = s.mean_auc[MethodIndex(s, MethodTag::kFused)];
    const double gbdt = s.mean_auc[MethodIndex(s, MethodTag::kGbdt)];
    const double prior = s.mean_auc[MethodIndex(s, MethodTag::kPrior)];
    const bool floor_ok = fused >= std::max(gbdt, prior) - 0.01;
    const bool gain_ok = s.size > 25 || fused - gbdt >= 0.02;
    pass = pass && floor_ok && gain_ok;
    d << "\n    size " << pb::data::SizeToString(s.size) << ": fused " << Fixed(fused) << ", gbdt " << Fixed(gbdt)
      << ", prior " << Fixed(prior) << (floor_ok ? "" : " [below max - 0.01]")
      << (gain_ok ? "" : " [gain over gbdt < 0.02]");
  }
  return {pass, "mean test AUC over 5 seeds" + d.str()};
}

Outcome BaselineOrdering(const pb::metrics::AggregateReport& r) {
  bool selection_ok = true;
  std::ostringstream d;
  for (const auto& s : r.sizes) {
    const double sel = s.mean_auc[MethodIndex(s, MethodTag::kSelection)];
    const double lo = std::min(s.mean_auc[MethodIndex(s, MethodTag::kGbdt)], s.mean_auc[MethodIndex(s, MethodTag::kPrior)]);
    if (sel < lo) selection_ok = false;
    d << "\n    size " << pb::data::SizeToString(s.size) << ": selection " << Fixed(sel) << " vs min(gbdt, prior) "
      << Fixed(lo);
  }
  const auto& smallest = r.sizes.front();
  const double fused_z = smallest.mean_z[MethodIndex(smallest, MethodTag::kFused)];
  const double max_z = *std::max_element(smallest.mean_z.begin(), smallest.mean_z.end());
  const bool z_ok = fused_z >= max_z;
  d << "\n    size " << pb::data::SizeToString(smallest.size) << " mean z:";
  for (std::size_t k = 0; k < smallest.methods.size(); ++k) {
    d << " " << pb::metrics::ToString(smallest.methods[k]) << " " << Fixed(smallest.mean_z[k]);
  }
  return {selection_ok && z_ok, std::string("selection >= min(gbdt, prior) at every size: ") +
                                    (selection_ok ? "yes" : "no") + "; fused z highest at smallest size: " +
                                    (z_ok ? "yes" : "no") + d.str()};
}

Outcome DeterminismAndResume(const std::string& scratch, const std::string& reference_records) {
  // Fresh rerun with a different worker count.
  pb::bench::BenchConfig rerun = DominanceConfig(scratch + "/rerun");
  rerun.workers = 3;
  pb::bench::RunBenchmark(rerun);
  const bool rerun_same = pb::text::ReadFile(scratch + "/rerun/records.csv") == reference_records;

  // Interrupted after 9 new cells, a torn final line appended, then resumed.
  const pb::bench::BenchConfig resumed = DominanceConfig(scratch + "/resumed");
  pb::bench::RunOptions stop;
  stop.max_new_cells = 9;
  const auto first = pb::bench::RunBenchmark(resumed, stop);
  {
    std::ofstream torn(scratch + "/resumed/records.csv", std::ios::app);
    torn << "synthetic,50,0,fused,0.9";
  }
  const auto second = pb::bench::RunBenchmark(resumed);
  const bool resume_same = pb::text::ReadFile(scratch + "/resumed/records.csv") == reference_records;
  std::ostringstream d;
  d << "fresh rerun (3 workers) identical: " << (rerun_same ? "yes" : "no") << "; interrupted after "
    << first.cells_computed << " cells, resumed with " << second.cells_reused << " reused + " << second.cells_computed
    << " computed, identical: " << (resume_same ? "yes" : "no");
  return {first.interrupted && rerun_same && resume_same, d.str()};
}

Outcome SmallestSizeExample(const std::string& scratch) {
  pb::bench::BenchConfig c = pb::bench::ParseConfig(
      "sizes = 10,50,250\n"
      "[dataset synthetic]\n"
      "synthetic = n_rows=2000,quality=1\n"
      "seed = 0\n",
      "");
  c.output = scratch + "/q1";
  const auto r = pb::bench::RunBenchmark(c).report;
  const auto& s = r.sizes.front();
  const double fused_z = s.mean_z[MethodIndex(s, MethodTag::kFused)];
  std::ostringstream d;
  d << "size 10 mean z:";
  for (std::size_t k = 0; k < s.methods.size(); ++k) d << " " << pb::metrics::ToString(s.methods[k]) << " " << Fixed(s.mean_z[k]);
  return {fused_z >= *std::max_element(s.mean_z.begin(), s.mean_z.end()), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  bool gate_exact = false;
  std::string scratch = (fs::temp_directory_path() / "priorboost_acceptance").string();
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--gate" && i + 1 < argc && std::string(argv[i + 1]) == "exact") {
      gate_exact = true;
      ++i;
    } else if (!arg.empty() && arg[0] != '-') {
      scratch = arg;
    } else {
      std::fprintf(stderr, "usage: acceptance [--gate exact] [scratch dir]\n");
      return 64;
    }
  }
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  pb::metrics::AggregateReport dominance;
  std::string reference_records;
  std::string dominance_error;
  const auto ensure_dominance_run = [&] {
    if (!reference_records.empty() || !dominance_error.empty()) return;
    try {
      dominance = pb::bench::RunBenchmark(DominanceConfig(scratch + "/dominance")).report;
      reference_records = pb::text::ReadFile(scratch + "/dominance/records.csv");
      pb::text::WriteFile(scratch + "/dominance/README", "acceptance run\n");
    } catch (const std::exception& e) {
      dominance_error = e.what();
    }
  };
  const auto with_run = [&](auto body) {
    return [&, body]() -> Outcome {
      ensure_dominance_run();
      if (!dominance_error.empty()) return {false, "benchmark failed: " + dominance_error};
      return body();
    };
  };

  const std::vector<Criterion> criteria = {
      {"s=0 equivalence", ScaleZeroEquivalence},
      {"zero-round monotone invariance", ZeroRoundInvariance},
      {"AUC oracle", AucOracle},
      {"split oracle", SplitOracle},
      {"sampler statistics", SamplerStatistics},
      {"metrics fixtures", MetricsFixtures},
      {"fusion dominance", with_run([&] { return FusionDominance(dominance); }), true},
      {"baseline ordering", with_run([&] { return BaselineOrdering(dominance); }), true},
      {"determinism & resume", with_run([&] { return DeterminismAndResume(scratch, reference_records); })},
      {"monotone loss", MonotoneLoss},
  };

  int failed = 0;
  int failed_gating = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) {
      ++failed;
      if (!gate_exact || !c.statistical) ++failed_gating;
    }
    std::printf("%s  %-32s (%.1f s)\n    %s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), seconds, o.detail.c_str());
    std::fflush(stdout);
  }

  // Documented benchmark example outside the criteria list, reported for reference only.
  try {
    const Outcome o = SmallestSizeExample(scratch);
    std::printf("INFO  example: q=1 prior, fused z highest at size 10: %s\n    %s\n", o.pass ? "yes" : "no",
                o.detail.c_str());
  } catch (const std::exception& e) {
    std::printf("INFO  example: q=1 prior run threw: %s\n", e.what());
  }

  std::printf("\n%zu criteria, %zu passed, %d failed\n", criteria.size(), criteria.size() - failed, failed);
  if (gate_exact) {
    std::printf("gating on exact criteria only: %d gating failure(s)\n", failed_gating);
  }
  return failed_gating;
}
