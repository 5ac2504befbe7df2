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


/*
 * C interface to PriorBoost: gradient-boosted trees seeded with transformer
 * prior scores, plus the benchmark harness.
 *
 * Objects are opaque handles released by the matching *_free function.
 * Every fallible call returns a pb_status; on failure pb_last_error() holds a
 * message for the calling thread. Strings returned through char** are owned
 * by the caller and released with pb_string_free.
 */

#ifndef PRIORBOOST_PRIORBOOST_H_
#define PRIORBOOST_PRIORBOOST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PRIORBOOST_BUILDING_LIBRARY)
#define PB_API __declspec(dllexport)
#else
#define PB_API __declspec(dllimport)
#endif
#else
#define PB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pb_status {
  PB_OK = 0,
  PB_ERR_INVALID_ARGUMENT = 1,
  PB_ERR_IO = 2,
  PB_ERR_PARSE = 3,
  PB_ERR_FAILED_PRECONDITION = 4,
  PB_ERR_NOT_FOUND = 5,
  PB_ERR_INTERNAL = 6,
  /* A benchmark finished without producing a single record. */
  PB_ERR_RUN_FAILED = 7
} pb_status;

typedef struct pb_dataset pb_dataset;
typedef struct pb_scores pb_scores;
typedef struct pb_model pb_model;
typedef struct pb_config pb_config;

PB_API const char* pb_version(void);
PB_API const char* pb_status_name(pb_status status);
/* Message of the last failed call on this thread; "" if none. */
PB_API const char* pb_last_error(void);
PB_API void pb_string_free(char* s);

/* ---- Tables ---------------------------------------------------------- */

/* Infers column kinds and class labels; returns the schema text form. */
PB_API pb_status pb_schema_infer(const char* csv_path, const char* target, char** out_schema);
/* Seeded permutation of the feature names of a schema text. */
PB_API pb_status pb_schema_shuffle_headers(const char* schema, uint64_t seed, char** out_schema);

PB_API pb_status pb_dataset_load(const char* csv_path, const char* target, pb_dataset** out);
PB_API void pb_dataset_free(pb_dataset* dataset);
PB_API size_t pb_dataset_num_rows(const pb_dataset* dataset);
PB_API size_t pb_dataset_num_features(const pb_dataset* dataset);
PB_API size_t pb_dataset_num_classes(const pb_dataset* dataset);
/* Copies the n_rows class indices into labels. */
PB_API pb_status pb_dataset_labels(const pb_dataset* dataset, int* labels, size_t capacity);

/*
 * Train/val/test ladder as a `dataset,size,seed,role,row_id` manifest.
 * sizes: comma list such as "10,25,full"; seeds: comma list of integers.
 * test_size < 0 uses test_fraction instead. out_notes (nullable) receives the
 * sizes skipped as infeasible, one per line.
 */
PB_API pb_status pb_split_manifest(const pb_dataset* dataset, const char* name, const char* sizes,
                                   const char* seeds, double test_fraction, int64_t test_size,
                                   char** out_manifest, char** out_notes);

/* ---- Priors and models ----------------------------------------------- */

/*
 * Writes a synthetic dataset CSV and its raw prior score file.
 * spec: comma-separated key=value list (n_rows, n_features, n_informative,
 * classes, weight_seed, label_noise, quality).
 */
PB_API pb_status pb_synth_write(const char* spec, uint64_t seed, const char* csv_path,
                                const char* scores_path);

/* Reads a score file for the dataset's classes and centers it along
 * "row" or "column". */
PB_API pb_status pb_scores_read(const char* path, const pb_dataset* dataset, const char* centering,
                                pb_scores** out);
PB_API void pb_scores_free(pb_scores* scores);

/*
 * Trains on the given rows. With scores == NULL this is a plain GBDT and
 * scale must be 0; otherwise the model starts from scale * centered prior.
 * params: space-separated key=value list; NULL or "" keeps the defaults.
 */
PB_API pb_status pb_model_train(const pb_dataset* dataset, const pb_scores* scores,
                                const int64_t* train_ids, size_t n_train, const char* params,
                                double scale, uint64_t seed, pb_model** out);
PB_API void pb_model_free(pb_model* model);
PB_API size_t pb_model_num_classes(const pb_model* model);
/* Class probabilities for the given rows, row-major n_ids x num_classes. */
PB_API pb_status pb_model_predict(const pb_model* model, const pb_dataset* dataset,
                                  const pb_scores* scores, const int64_t* ids, size_t n_ids,
                                  double* out_proba, size_t capacity);
PB_API pb_status pb_model_save(const pb_model* model, char** out_text);
PB_API pb_status pb_model_load(const char* text, pb_model** out);

/* Mann-Whitney AUC of binary labels (0/1). */
PB_API pb_status pb_auc(const double* scores, const int* labels, size_t n, double* out_auc);

/* ---- Benchmark ------------------------------------------------------- */

typedef struct pb_run_info {
  size_t cells_total;
  size_t cells_reused;
  size_t cells_computed;
  size_t cells_failed;
  int interrupted;
} pb_run_info;

typedef void (*pb_log_fn)(const char* line, void* user);

PB_API pb_status pb_config_load(const char* path, pb_config** out);
/* Empty configuration; populate with pb_config_set. */
PB_API pb_status pb_config_new(pb_config** out);
PB_API void pb_config_free(pb_config* config);
/* One `key=value` override; dataset keys use `dataset.NAME.key`. */
PB_API pb_status pb_config_set(pb_config* config, const char* assignment);
PB_API pb_status pb_config_validate(const pb_config* config);
PB_API pb_status pb_config_text(const pb_config* config, char** out_text);

/*
 * Runs or resumes the benchmark into the configured output directory.
 * max_new_cells >= 0 stops after that many newly computed cells.
 * Returns PB_ERR_RUN_FAILED when no cell produced records.
 */
PB_API pb_status pb_benchmark_run(const pb_config* config, int64_t max_new_cells, pb_log_fn log,
                                  void* user, pb_run_info* out_info);

/* Rebuilds the report files from a records.csv. splits_path may be NULL. */
PB_API pb_status pb_report_from_records(const char* records_path, const char* splits_path,
                                        const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* PRIORBOOST_PRIORBOOST_H_ */
