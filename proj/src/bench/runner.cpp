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


#include "bench/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include "baselines/baselines.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "fusion/fusion.hpp"
#include "gbdt/gbdt.hpp"
#include "hpo/hpo.hpp"
#include "synthetic/synthetic.hpp"

namespace priorboost::bench {
namespace {

using metrics::EvalRecord;
using metrics::MethodTag;

struct LoadedDataset {
  const DatasetEntry* entry = nullptr;
  data::Dataset dataset;
  std::optional<fusion::PriorScores> centered;
  data::SplitPlan plan;
};

using CellKey = std::tuple<std::string, data::NominalSize, std::uint64_t>;

CellKey KeyOf(const EvalRecord& r) { return {r.dataset, r.size, r.seed}; }

std::string CellName(const CellKey& key) {
  return std::get<0>(key) + "/size=" + data::SizeToString(std::get<1>(key)) +
         "/seed=" + std::to_string(std::get<2>(key));
}

LoadedDataset Load(const BenchConfig& config, const DatasetEntry& entry) {
  LoadedDataset out;
  out.entry = &entry;
  std::optional<fusion::PriorScores> raw;
  if (entry.synthetic) {
    synth::Generated g = synth::Generate(*entry.synthetic, entry.synthetic_seed);
    out.dataset = std::move(g.dataset);
    raw = synth::MakePrior(g.true_logits, out.dataset.row_ids, out.dataset.schema.class_labels,
                           entry.synthetic->prior_quality, DeriveSeed(entry.synthetic_seed, 0x9a1));
  } else {
    const data::TableSchema schema = data::InferSchema(entry.data_path, entry.target);
    out.dataset = data::LoadCsv(entry.data_path, schema);
    if (config.NeedsPrior()) raw = fusion::ReadScoreFile(entry.scores_path, out.dataset.schema.class_labels);
  }
  if (config.shuffle_headers && out.dataset.n_features >= 2) {
    out.dataset.schema = data::ShuffleHeaders(out.dataset.schema,
                                              DeriveSeed(config.shuffle_seed, text::Fnv1a(entry.name)));
  }
  if (raw && config.NeedsPrior()) {
    out.centered = fusion::CenterScores(*raw, config.centering);
    out.centered->Lookup(out.dataset.row_ids);
  }
  data::SplitOptions split_options;
  split_options.test_fraction = config.test_fraction;
  split_options.test_size = entry.test_size;
  out.plan = data::MakeSplits(out.dataset, config.sizes, config.seeds, split_options);
  for (std::string& note : out.plan.notes) note = entry.name + ": " + note;
  return out;
}

gbdt::MarginMatrix ZeroMargins(const data::Dataset& rows) {
  const gbdt::Objective objective = gbdt::ObjectiveFor(rows.NumClasses());
  return gbdt::MarginMatrix(rows.n_rows, gbdt::MarginWidth(objective, rows.NumClasses()));
}

double AucOf(const gbdt::MarginMatrix& margins, const data::Dataset& rows) {
  const gbdt::Objective objective = gbdt::ObjectiveFor(rows.NumClasses());
  return metrics::AucMulticlass(gbdt::RankingScores(margins, objective), rows.labels).value;
}

// Refits the winning trial on the train rows and scores the test rows.
double PlainTestAuc(const data::Dataset& dataset, const data::SplitSpec& split,
                    const gbdt::GbdtParams& params, std::uint64_t seed) {
  const data::Dataset train = dataset.Subset(split.train_ids);
  const data::Dataset test = dataset.Subset(split.test_ids);
  gbdt::TrainOptions options;
  options.seed = seed;
  const gbdt::Ensemble model = gbdt::Train(train, params, ZeroMargins(train),
                                           gbdt::ObjectiveFor(dataset.NumClasses()),
                                           gbdt::BaseMarginKind::kConstant, options);
  return AucOf(gbdt::PredictMargin(model, gbdt::FeatureView::Of(test), ZeroMargins(test)), test);
}

double PriorAuc(const fusion::PriorScores& centered, const data::Dataset& dataset,
                std::span<const data::RowId> ids) {
  const data::Dataset rows = dataset.Subset(ids);
  const gbdt::Objective objective = gbdt::ObjectiveFor(dataset.NumClasses());
  return AucOf(fusion::MarginsForRows(centered, fusion::ScaleParam(1.0), objective, ids), rows);
}

std::vector<EvalRecord> RunCell(const BenchConfig& config, const LoadedDataset& ld,
                                const data::SplitSpec& split) {
  const data::Dataset& ds = ld.dataset;
  const hpo::SearchSpace space = hpo::SearchSpace::For(config.space);
  const std::uint64_t cell_seed = DeriveSeed(split.seed, text::Fnv1a(ld.entry->name),
                                             static_cast<std::uint64_t>(static_cast<std::int64_t>(split.nominal_size)));
  hpo::TuneOptions tune;
  tune.workers = config.workers;

  const auto record = [&](MethodTag method, double val_auc, double test_auc) {
    return EvalRecord{ld.entry->name, split.nominal_size, split.seed, method, val_auc, test_auc};
  };

  // The plain study doubles as fusion stage one: a prefix of a random-search
  // study is the smaller study with the same seed.
  std::optional<hpo::StudyResult> plain;
  const bool want_plain = config.Wants(MethodTag::kGbdt) || config.Wants(MethodTag::kSelection) ||
                          (config.Wants(MethodTag::kFused) && config.budget_gbdt <= config.budget_baseline);
  if (want_plain) {
    tune.seed = DeriveSeed(cell_seed, 1);
    plain = hpo::TuneGbdt(ds, split, space, config.budget_baseline, {}, tune);
  }

  std::optional<EvalRecord> gbdt_record;
  if (plain && (config.Wants(MethodTag::kGbdt) || config.Wants(MethodTag::kSelection))) {
    const hpo::Trial& best = plain->Best();
    gbdt_record = record(MethodTag::kGbdt, best.val_auc,
                         PlainTestAuc(ds, split, space.ToParams(best.params), best.seed));
  }
  std::optional<EvalRecord> prior_record;
  if (ld.centered && (config.Wants(MethodTag::kPrior) || config.Wants(MethodTag::kSelection))) {
    prior_record = record(MethodTag::kPrior, PriorAuc(*ld.centered, ds, split.val_ids),
                          PriorAuc(*ld.centered, ds, split.test_ids));
  }

  std::vector<EvalRecord> out;
  for (MethodTag method : metrics::kAllMethods) {
    if (!config.Wants(method)) continue;
    switch (method) {
      case MethodTag::kGbdt:
        out.push_back(*gbdt_record);
        break;
      case MethodTag::kPrior:
        out.push_back(*prior_record);
        break;
      case MethodTag::kSelection: {
        const bool gbdt_wins = baselines::SelectBest(gbdt_record->val_auc, prior_record->val_auc) ==
                               MethodTag::kGbdt;
        const EvalRecord& chosen = gbdt_wins ? *gbdt_record : *prior_record;
        out.push_back(record(MethodTag::kSelection, chosen.val_auc, chosen.test_auc));
        break;
      }
      case MethodTag::kStacking: {
        const data::Dataset stacked = baselines::StackFeatures(ds, *ld.centered);
        tune.seed = DeriveSeed(cell_seed, 2);
        const hpo::StudyResult study = hpo::TuneGbdt(stacked, split, space, config.budget_baseline, {}, tune);
        const hpo::Trial& best = study.Best();
        out.push_back(record(MethodTag::kStacking, best.val_auc,
                             PlainTestAuc(stacked, split, space.ToParams(best.params), best.seed)));
        break;
      }
      case MethodTag::kFused: {
        hpo::StudyResult stage1;
        if (plain) {
          stage1 = hpo::Prefix(*plain, static_cast<std::size_t>(config.budget_gbdt));
        } else {
          tune.seed = DeriveSeed(cell_seed, 1);
          stage1 = hpo::TuneGbdt(ds, split, space, config.budget_gbdt, {}, tune);
        }
        const hpo::Trial& best = stage1.Best();
        const gbdt::GbdtParams params = space.ToParams(best.params);
        tune.seed = DeriveSeed(cell_seed, 3);
        const hpo::ScaleStudy scale =
            hpo::TuneScale(ds, split, *ld.centered, params, best.seed, config.budget_scale, tune);
        const fusion::FusedModel model = fusion::TrainFused(ds, split, *ld.centered, scale.best, params, best.seed);
        const data::Dataset test = ds.Subset(split.test_ids);
        const double test_auc = AucOf(fusion::PredictFusedMargin(model, ds, split.test_ids, *ld.centered), test);
        out.push_back(record(MethodTag::kFused, scale.study.Best().val_auc, test_auc));
        break;
      }
    }
  }
  return out;
}

// The fields that determine results; resuming under a different one would mix
// incompatible records.
std::string Fingerprint(const BenchConfig& config) {
  BenchConfig c = config;
  c.workers = 1;
  c.output.clear();
  return c.ToText();
}

void AppendRecords(const std::string& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  Check(static_cast<bool>(out), ErrorCode::kIo, "cannot append to " + path);
  std::string body = FormatRecords(records);
  body.erase(0, body.find('\n') + 1);  // header already present
  out << body;
  out.flush();
  Check(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path);
}

}  // namespace

RunResult RunBenchmark(const BenchConfig& config, const RunOptions& options) {
  config.Validate();
  const auto log = [&](const std::string& line) {
    if (options.log) options.log(line);
  };

  std::vector<LoadedDataset> loaded;
  loaded.reserve(config.datasets.size());
  for (const DatasetEntry& entry : config.datasets) loaded.push_back(Load(config, entry));

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output, ec);
  Check(!ec, ErrorCode::kIo, "cannot create output directory " + config.output + ": " + ec.message());
  const std::string records_path = (fs::path(config.output) / "records.csv").string();
  const std::string fingerprint_path = (fs::path(config.output) / "config.txt").string();

  RunResult result;
  for (const LoadedDataset& ld : loaded) {
    result.notes.insert(result.notes.end(), ld.plan.notes.begin(), ld.plan.notes.end());
    for (const data::SplitSpec& s : ld.plan.splits) {
      result.shapes[{ld.entry->name, s.nominal_size}] = {s.train_ids.size(), s.val_ids.size(), s.test_ids.size()};
    }
    text::WriteFile((fs::path(config.output) / ("manifest_" + ld.entry->name + ".csv")).string(),
                    data::SplitManifest(ld.entry->name, ld.plan.splits));
  }

  // Keep complete cells from a previous attempt of the same configuration.
  std::set<MethodTag> wanted(config.methods.begin(), config.methods.end());
  std::map<CellKey, std::vector<EvalRecord>> done;
  const std::string fingerprint = Fingerprint(config);
  if (fs::exists(records_path)) {
    Check(fs::exists(fingerprint_path) && text::ReadFile(fingerprint_path) == fingerprint,
          ErrorCode::kFailedPrecondition,
          "output directory " + config.output + " holds records of a different configuration");
    std::size_t discarded = 0;
    std::map<CellKey, std::vector<EvalRecord>> found;
    for (EvalRecord& r : ParseRecords(text::ReadFile(records_path), &discarded)) found[KeyOf(r)].push_back(r);
    for (auto& [key, records] : found) {
      std::set<MethodTag> have;
      for (const EvalRecord& r : records) have.insert(r.method);
      if (have == wanted && records.size() == wanted.size()) done[key] = std::move(records);
    }
    if (discarded > 0) log("discarded " + std::to_string(discarded) + " unreadable record line(s)");
  }
  text::WriteFile(fingerprint_path, fingerprint);
  {
    std::vector<EvalRecord> kept;
    for (const auto& [key, records] : done) kept.insert(kept.end(), records.begin(), records.end());
    metrics::SortRecords(kept);
    text::WriteFile(records_path, FormatRecords(kept));
  }

  std::vector<EvalRecord> all;
  for (const LoadedDataset& ld : loaded) {
    for (const data::SplitSpec& split : ld.plan.splits) {
      const CellKey key{ld.entry->name, split.nominal_size, split.seed};
      ++result.cells_total;
      if (const auto it = done.find(key); it != done.end()) {
        ++result.cells_reused;
        all.insert(all.end(), it->second.begin(), it->second.end());
        continue;
      }
      if (options.max_new_cells && result.cells_computed >= *options.max_new_cells) {
        result.interrupted = true;
        return result;
      }
      ++result.cells_computed;
      try {
        std::vector<EvalRecord> records = RunCell(config, ld, split);
        AppendRecords(records_path, records);
        all.insert(all.end(), records.begin(), records.end());
        log("cell " + CellName(key) + " done");
      } catch (const Error& e) {
        ++result.cells_failed;
        result.notes.push_back("cell " + CellName(key) + " failed: " + e.what());
        log("cell " + CellName(key) + " failed: " + e.what());
      }
    }
  }

  if (all.empty()) {
    result.notes.push_back("no cell produced records");
    text::WriteFile((fs::path(config.output) / "notes.txt").string(), [&] {
      std::string s;
      for (const std::string& n : result.notes) s += n + "\n";
      return s;
    }());
    return result;
  }
  result.report = metrics::Aggregate(std::move(all));
  result.report.notes.insert(result.report.notes.begin(), result.notes.begin(), result.notes.end());
  EmitReport(result.report, result.shapes, config.output, &config);
  return result;
}

}  // namespace priorboost::bench
