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


#include "priorboost/priorboost.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "bench/config.hpp"
#include "bench/runner.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "dataset/dataset.hpp"
#include "fusion/fusion.hpp"
#include "gbdt/gbdt.hpp"
#include "metrics/metrics.hpp"
#include "synthetic/synthetic.hpp"

namespace pb = priorboost;

struct pb_dataset {
  pb::data::Dataset dataset;
};

struct pb_scores {
  pb::fusion::PriorScores centered;
};

struct pb_model {
  // Exactly one is set.
  std::optional<pb::gbdt::Ensemble> plain;
  std::optional<pb::fusion::FusedModel> fused;

  const pb::gbdt::Ensemble& ensemble() const { return plain ? *plain : fused->ensemble; }
};

struct pb_config {
  pb::bench::BenchConfig config;
};

namespace {

thread_local std::string g_last_error;

pb_status ToStatus(pb::ErrorCode code) {
  switch (code) {
    case pb::ErrorCode::kInvalidArgument: return PB_ERR_INVALID_ARGUMENT;
    case pb::ErrorCode::kIo: return PB_ERR_IO;
    case pb::ErrorCode::kParse: return PB_ERR_PARSE;
    case pb::ErrorCode::kFailedPrecondition: return PB_ERR_FAILED_PRECONDITION;
    case pb::ErrorCode::kNotFound: return PB_ERR_NOT_FOUND;
    case pb::ErrorCode::kInternal: return PB_ERR_INTERNAL;
  }
  return PB_ERR_INTERNAL;
}

pb_status SetError(pb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes at the C boundary.
template <typename Body>
pb_status Guard(Body&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const pb::Error& e) {
    return SetError(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(PB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(PB_ERR_INTERNAL, e.what());
  } catch (...) {
    return SetError(PB_ERR_INTERNAL, "unknown error");
  }
}

void Require(bool condition, const char* message) {
  pb::Check(condition, pb::ErrorCode::kInvalidArgument, message);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename T>
std::vector<T> ParseList(const char* list, const char* what) {
  std::vector<T> out;
  for (const std::string& item : pb::text::Split(list, ',')) {
    const std::string_view t = pb::text::Trim(item);
    if (t.empty()) continue;
    if constexpr (std::is_same_v<T, pb::data::NominalSize>) {
      const auto size = pb::data::ParseSize(std::string(t));
      pb::Check(size.has_value(), pb::ErrorCode::kParse, std::string("bad ") + what + ": " + std::string(t));
      out.push_back(*size);
    } else {
      const auto v = pb::text::ParseUint(t);
      pb::Check(v.has_value(), pb::ErrorCode::kParse, std::string("bad ") + what + ": " + std::string(t));
      out.push_back(*v);
    }
  }
  pb::Check(!out.empty(), pb::ErrorCode::kInvalidArgument, std::string("empty ") + what + " list");
  return out;
}

}  // namespace

extern "C" {

const char* pb_version(void) { return "0.1.0"; }

const char* pb_status_name(pb_status status) {
  switch (status) {
    case PB_OK: return "ok";
    case PB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PB_ERR_IO: return "i/o error";
    case PB_ERR_PARSE: return "parse error";
    case PB_ERR_FAILED_PRECONDITION: return "failed precondition";
    case PB_ERR_NOT_FOUND: return "not found";
    case PB_ERR_INTERNAL: return "internal error";
    case PB_ERR_RUN_FAILED: return "run failed";
  }
  return "unknown status";
}

const char* pb_last_error(void) { return g_last_error.c_str(); }

void pb_string_free(char* s) { std::free(s); }

pb_status pb_schema_infer(const char* csv_path, const char* target, char** out_schema) {
  return Guard([&] {
    Require(csv_path && target && out_schema, "null argument");
    *out_schema = CopyString(pb::data::InferSchema(csv_path, target).ToText());
    return PB_OK;
  });
}

pb_status pb_schema_shuffle_headers(const char* schema, uint64_t seed, char** out_schema) {
  return Guard([&] {
    Require(schema && out_schema, "null argument");
    const pb::data::TableSchema parsed = pb::data::TableSchema::FromText(schema);
    *out_schema = CopyString(pb::data::ShuffleHeaders(parsed, seed).ToText());
    return PB_OK;
  });
}

pb_status pb_dataset_load(const char* csv_path, const char* target, pb_dataset** out) {
  return Guard([&] {
    Require(csv_path && target && out, "null argument");
    auto handle = std::make_unique<pb_dataset>();
    handle->dataset = pb::data::LoadCsv(csv_path, pb::data::InferSchema(csv_path, target));
    *out = handle.release();
    return PB_OK;
  });
}

void pb_dataset_free(pb_dataset* dataset) { delete dataset; }

size_t pb_dataset_num_rows(const pb_dataset* dataset) { return dataset ? dataset->dataset.n_rows : 0; }

size_t pb_dataset_num_features(const pb_dataset* dataset) {
  return dataset ? dataset->dataset.n_features : 0;
}

size_t pb_dataset_num_classes(const pb_dataset* dataset) {
  return dataset ? dataset->dataset.NumClasses() : 0;
}

pb_status pb_dataset_labels(const pb_dataset* dataset, int* labels, size_t capacity) {
  return Guard([&] {
    Require(dataset && labels, "null argument");
    Require(capacity >= dataset->dataset.n_rows, "label buffer too small");
    std::copy(dataset->dataset.labels.begin(), dataset->dataset.labels.end(), labels);
    return PB_OK;
  });
}

pb_status pb_split_manifest(const pb_dataset* dataset, const char* name, const char* sizes,
                            const char* seeds, double test_fraction, int64_t test_size,
                            char** out_manifest, char** out_notes) {
  return Guard([&] {
    Require(dataset && name && sizes && seeds && out_manifest, "null argument");
    Require(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must lie in (0, 1)");
    pb::data::SplitOptions options;
    options.test_fraction = test_fraction;
    if (test_size >= 0) options.test_size = static_cast<std::size_t>(test_size);
    const auto size_list = ParseList<pb::data::NominalSize>(sizes, "size");
    const auto seed_list = ParseList<std::uint64_t>(seeds, "seed");
    const pb::data::SplitPlan plan = pb::data::MakeSplits(dataset->dataset, size_list, seed_list, options);
    std::string notes;
    for (const std::string& n : plan.notes) notes += n + "\n";
    char* manifest = CopyString(pb::data::SplitManifest(name, plan.splits));
    if (out_notes) {
      try {
        *out_notes = CopyString(notes);
      } catch (...) {
        std::free(manifest);
        throw;
      }
    }
    *out_manifest = manifest;
    return PB_OK;
  });
}

pb_status pb_synth_write(const char* spec, uint64_t seed, const char* csv_path, const char* scores_path) {
  return Guard([&] {
    Require(spec && csv_path && scores_path, "null argument");
    const pb::synth::SyntheticSpec parsed = pb::synth::SyntheticSpec::FromString(spec);
    const pb::synth::Generated g = pb::synth::Generate(parsed, seed);
    const pb::fusion::PriorScores prior =
        pb::synth::MakePrior(g.true_logits, g.dataset.row_ids, g.dataset.schema.class_labels,
                             parsed.prior_quality, pb::DeriveSeed(seed, 0x9a1));
    pb::synth::WriteCsv(g.dataset, csv_path);
    pb::fusion::WriteScoreFile(prior, scores_path);
    return PB_OK;
  });
}

pb_status pb_scores_read(const char* path, const pb_dataset* dataset, const char* centering, pb_scores** out) {
  return Guard([&] {
    Require(path && dataset && out, "null argument");
    const pb::fusion::CenteringAxis axis =
        pb::fusion::ParseAxis(centering && *centering ? centering : "row");
    auto handle = std::make_unique<pb_scores>();
    handle->centered = pb::fusion::CenterScores(
        pb::fusion::ReadScoreFile(path, dataset->dataset.schema.class_labels), axis);
    *out = handle.release();
    return PB_OK;
  });
}

void pb_scores_free(pb_scores* scores) { delete scores; }

pb_status pb_model_train(const pb_dataset* dataset, const pb_scores* scores, const int64_t* train_ids,
                         size_t n_train, const char* params, double scale, uint64_t seed, pb_model** out) {
  return Guard([&] {
    Require(dataset && train_ids && out && n_train > 0, "null or empty argument");
    const pb::gbdt::GbdtParams p =
        params && *params ? pb::gbdt::GbdtParams::FromString(params) : pb::gbdt::GbdtParams{};
    const std::vector<pb::data::RowId> ids(train_ids, train_ids + n_train);
    auto handle = std::make_unique<pb_model>();
    if (scores) {
      pb::data::SplitSpec split;
      split.train_ids = ids;
      handle->fused = pb::fusion::TrainFused(dataset->dataset, split, scores->centered,
                                             pb::fusion::ScaleParam(scale), p, seed);
    } else {
      Require(scale == 0.0, "a plain model takes scale 0");
      const pb::data::Dataset train = dataset->dataset.Subset(ids);
      const pb::gbdt::Objective objective = pb::gbdt::ObjectiveFor(train.NumClasses());
      const pb::gbdt::MarginMatrix base(train.n_rows, pb::gbdt::MarginWidth(objective, train.NumClasses()));
      pb::gbdt::TrainOptions options;
      options.seed = seed;
      handle->plain = pb::gbdt::Train(train, p, base, objective, pb::gbdt::BaseMarginKind::kConstant, options);
    }
    *out = handle.release();
    return PB_OK;
  });
}

void pb_model_free(pb_model* model) { delete model; }

size_t pb_model_num_classes(const pb_model* model) { return model ? model->ensemble().n_classes : 0; }

pb_status pb_model_predict(const pb_model* model, const pb_dataset* dataset, const pb_scores* scores,
                           const int64_t* ids, size_t n_ids, double* out_proba, size_t capacity) {
  return Guard([&] {
    Require(model && dataset && ids && out_proba, "null argument");
    const std::vector<pb::data::RowId> id_list(ids, ids + n_ids);
    pb::gbdt::MarginMatrix proba;
    if (model->fused) {
      pb::Check(scores != nullptr, pb::ErrorCode::kFailedPrecondition, "a fused model needs its prior scores");
      proba = pb::fusion::PredictFused(*model->fused, dataset->dataset, id_list, scores->centered);
    } else {
      const pb::gbdt::Ensemble& e = *model->plain;
      const pb::data::Dataset rows = dataset->dataset.Subset(id_list);
      const pb::gbdt::MarginMatrix base = pb::gbdt::MarginMatrix(rows.n_rows, e.MarginWidth());
      proba = pb::gbdt::PredictProba(pb::gbdt::PredictMargin(e, pb::gbdt::FeatureView::Of(rows), base), e.objective);
    }
    Require(capacity >= proba.values.size(), "probability buffer too small");
    std::copy(proba.values.begin(), proba.values.end(), out_proba);
    return PB_OK;
  });
}

pb_status pb_model_save(const pb_model* model, char** out_text) {
  return Guard([&] {
    Require(model && out_text, "null argument");
    *out_text = CopyString(model->fused ? pb::fusion::SaveFusedModel(*model->fused)
                                        : pb::gbdt::SaveEnsemble(*model->plain));
    return PB_OK;
  });
}

pb_status pb_model_load(const char* text, pb_model** out) {
  return Guard([&] {
    Require(text && out, "null argument");
    auto handle = std::make_unique<pb_model>();
    if (std::strncmp(text, "priorboost-fused", 16) == 0) {
      handle->fused = pb::fusion::LoadFusedModel(text);
    } else {
      handle->plain = pb::gbdt::LoadEnsemble(text);
      pb::Check(handle->plain->base_margin_kind == pb::gbdt::BaseMarginKind::kConstant,
                pb::ErrorCode::kParse, "ensemble needs external margins; save it as a fused model");
    }
    *out = handle.release();
    return PB_OK;
  });
}

pb_status pb_auc(const double* scores, const int* labels, size_t n, double* out_auc) {
  return Guard([&] {
    Require(scores && labels && out_auc, "null argument");
    *out_auc = pb::metrics::AucBinary({scores, n}, {labels, n});
    return PB_OK;
  });
}

pb_status pb_config_load(const char* path, pb_config** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    auto handle = std::make_unique<pb_config>();
    handle->config = pb::bench::LoadConfig(path);
    *out = handle.release();
    return PB_OK;
  });
}

pb_status pb_config_new(pb_config** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = new pb_config();
    return PB_OK;
  });
}

void pb_config_free(pb_config* config) { delete config; }

pb_status pb_config_set(pb_config* config, const char* assignment) {
  return Guard([&] {
    Require(config && assignment, "null argument");
    config->config.Set(assignment);
    return PB_OK;
  });
}

pb_status pb_config_validate(const pb_config* config) {
  return Guard([&] {
    Require(config, "null argument");
    config->config.Validate();
    return PB_OK;
  });
}

pb_status pb_config_text(const pb_config* config, char** out_text) {
  return Guard([&] {
    Require(config && out_text, "null argument");
    *out_text = CopyString(config->config.ToText());
    return PB_OK;
  });
}

pb_status pb_benchmark_run(const pb_config* config, int64_t max_new_cells, pb_log_fn log, void* user,
                           pb_run_info* out_info) {
  return Guard([&] {
    Require(config, "null argument");
    pb::bench::RunOptions options;
    if (max_new_cells >= 0) options.max_new_cells = static_cast<std::size_t>(max_new_cells);
    if (log) options.log = [&](const std::string& line) { log(line.c_str(), user); };
    const pb::bench::RunResult result = pb::bench::RunBenchmark(config->config, options);
    if (out_info) {
      out_info->cells_total = result.cells_total;
      out_info->cells_reused = result.cells_reused;
      out_info->cells_computed = result.cells_computed;
      out_info->cells_failed = result.cells_failed;
      out_info->interrupted = result.interrupted ? 1 : 0;
    }
    if (result.TotalFailure()) {
      std::string message = "no cell produced records";
      if (result.notes.size() >= 2) message += " (last: " + result.notes[result.notes.size() - 2] + ")";
      return SetError(PB_ERR_RUN_FAILED, message);
    }
    return PB_OK;
  });
}

pb_status pb_report_from_records(const char* records_path, const char* splits_path, const char* out_dir) {
  return Guard([&] {
    Require(records_path && out_dir, "null argument");
    std::size_t discarded = 0;
    std::vector<pb::metrics::EvalRecord> records =
        pb::bench::ParseRecords(pb::text::ReadFile(records_path), &discarded);
    pb::Check(!records.empty(), pb::ErrorCode::kInvalidArgument, std::string("no records in ") + records_path);
    pb::bench::ShapeMap shapes;
    if (splits_path) shapes = pb::bench::ParseShapes(pb::text::ReadFile(splits_path));
    pb::metrics::AggregateReport report = pb::metrics::Aggregate(std::move(records));
    if (discarded > 0) report.notes.push_back(std::to_string(discarded) + " unreadable record line(s) skipped");
    pb::bench::EmitReport(report, shapes, out_dir);
    return PB_OK;
  });
}

}  // extern "C"
