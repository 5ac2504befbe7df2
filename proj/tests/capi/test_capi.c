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


/* Exercises the C interface from C: handles, status codes and ownership. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "priorboost/priorboost.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

#define EXPECT_OK(call)                                                          \
  do {                                                                           \
    pb_status st_ = (call);                                                      \
    if (st_ != PB_OK) {                                                          \
      fprintf(stderr, "%s:%d: %s -> %s: %s\n", __FILE__, __LINE__, #call,       \
              pb_status_name(st_), pb_last_error());                             \
      ++failures;                                                                \
    }                                                                            \
  } while (0)

static void CountLines(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static char* Join(const char* dir, const char* name) {
  char* out = malloc(strlen(dir) + strlen(name) + 2);
  sprintf(out, "%s/%s", dir, name);
  return out;
}

int main(int argc, char** argv) {
  if (argc != 2) {
    fprintf(stderr, "usage: %s <scratch dir>\n", argv[0]);
    return 2;
  }
  const char* dir = argv[1];
  char* csv = Join(dir, "capi.csv");
  char* scores_path = Join(dir, "capi_scores.csv");
  char* out_dir = Join(dir, "capi_bench");

  EXPECT(strlen(pb_version()) > 0);
  EXPECT(strcmp(pb_status_name(PB_ERR_PARSE), "parse error") == 0);

  EXPECT_OK(pb_synth_write("n_rows=300,quality=0.9", 4, csv, scores_path));

  char* schema = NULL;
  EXPECT_OK(pb_schema_infer(csv, "label", &schema));
  EXPECT(schema != NULL && strstr(schema, "label") != NULL);
  char* shuffled = NULL;
  EXPECT_OK(pb_schema_shuffle_headers(schema, 7, &shuffled));
  EXPECT(shuffled != NULL && strlen(shuffled) == strlen(schema));
  pb_string_free(shuffled);
  pb_string_free(schema);

  pb_dataset* ds = NULL;
  EXPECT(pb_dataset_load("/nonexistent.csv", "label", &ds) == PB_ERR_IO);
  EXPECT(strlen(pb_last_error()) > 0);
  EXPECT_OK(pb_dataset_load(csv, "label", &ds));
  EXPECT(pb_dataset_num_rows(ds) == 300);
  EXPECT(pb_dataset_num_features(ds) == 8);
  EXPECT(pb_dataset_num_classes(ds) == 2);
  int labels[300];
  EXPECT_OK(pb_dataset_labels(ds, labels, 300));
  EXPECT(pb_dataset_labels(ds, labels, 10) == PB_ERR_INVALID_ARGUMENT);

  char* manifest = NULL;
  char* notes = NULL;
  EXPECT_OK(pb_split_manifest(ds, "syn", "10,250", "0,1", 0.2, -1, &manifest, &notes));
  EXPECT(manifest != NULL && strncmp(manifest, "dataset,size,seed,role,row_id", 29) == 0);
  EXPECT(notes != NULL && strstr(notes, "250") != NULL);
  pb_string_free(manifest);
  pb_string_free(notes);
  EXPECT(pb_split_manifest(ds, "syn", "ten", "0", 0.2, -1, &manifest, NULL) != PB_OK);

  pb_scores* scores = NULL;
  EXPECT(pb_scores_read(scores_path, ds, "diagonal", &scores) != PB_OK);
  EXPECT_OK(pb_scores_read(scores_path, ds, "row", &scores));

  int64_t train[200], test[100];
  for (int i = 0; i < 200; ++i) train[i] = i;
  for (int i = 0; i < 100; ++i) test[i] = 200 + i;

  /* s = 0 with a prior equals the plain model bit for bit. */
  pb_model* plain = NULL;
  pb_model* fused0 = NULL;
  pb_model* fused = NULL;
  EXPECT_OK(pb_model_train(ds, NULL, train, 200, "max_depth=3 num_rounds=10", 0.0, 1, &plain));
  EXPECT_OK(pb_model_train(ds, scores, train, 200, "max_depth=3 num_rounds=10", 0.0, 1, &fused0));
  EXPECT_OK(pb_model_train(ds, scores, train, 200, "max_depth=3 num_rounds=10", 2.0, 1, &fused));
  EXPECT(pb_model_train(ds, NULL, train, 200, NULL, 1.0, 1, &plain) == PB_ERR_INVALID_ARGUMENT);
  EXPECT(pb_model_train(ds, NULL, train, 200, "depth=3", 0.0, 1, &plain) != PB_OK);
  EXPECT(pb_model_num_classes(plain) == 2);

  double p_plain[200], p_fused0[200], p_fused[200];
  EXPECT_OK(pb_model_predict(plain, ds, NULL, test, 100, p_plain, 200));
  EXPECT_OK(pb_model_predict(fused0, ds, scores, test, 100, p_fused0, 200));
  EXPECT_OK(pb_model_predict(fused, ds, scores, test, 100, p_fused, 200));
  EXPECT(memcmp(p_plain, p_fused0, sizeof p_plain) == 0);
  EXPECT(pb_model_predict(fused, ds, NULL, test, 100, p_fused, 200) != PB_OK);

  double positive[100];
  int test_labels[100];
  for (int i = 0; i < 100; ++i) {
    positive[i] = p_fused[2 * i + 1];
    test_labels[i] = labels[200 + i];
    EXPECT(fabs(p_fused[2 * i] + p_fused[2 * i + 1] - 1.0) < 1e-12);
  }
  double auc = 0.0;
  EXPECT_OK(pb_auc(positive, test_labels, 100, &auc));
  EXPECT(auc > 0.5 && auc <= 1.0);
  int one_class[2] = {1, 1};
  EXPECT(pb_auc(positive, one_class, 2, &auc) != PB_OK);

  /* Save and load preserve predictions exactly. */
  char* text = NULL;
  EXPECT_OK(pb_model_save(fused, &text));
  pb_model* loaded = NULL;
  EXPECT_OK(pb_model_load(text, &loaded));
  pb_string_free(text);
  double p_loaded[200];
  EXPECT_OK(pb_model_predict(loaded, ds, scores, test, 100, p_loaded, 200));
  EXPECT(memcmp(p_loaded, p_fused, sizeof p_fused) == 0);
  EXPECT(pb_model_load("garbage", &loaded) == PB_ERR_PARSE);

  pb_model_free(loaded);
  pb_model_free(fused);
  pb_model_free(fused0);
  pb_model_free(plain);
  pb_scores_free(scores);
  pb_dataset_free(ds);

  /* Benchmark through the config handle. */
  pb_config* cfg = NULL;
  EXPECT_OK(pb_config_new(&cfg));
  EXPECT(pb_config_validate(cfg) != PB_OK);
  EXPECT_OK(pb_config_set(cfg, "sizes=10"));
  EXPECT_OK(pb_config_set(cfg, "seeds=0"));
  EXPECT_OK(pb_config_set(cfg, "budget_gbdt=2"));
  EXPECT_OK(pb_config_set(cfg, "budget_scale=1"));
  EXPECT_OK(pb_config_set(cfg, "budget_baseline=3"));
  EXPECT_OK(pb_config_set(cfg, "dataset.syn.synthetic=n_rows=200"));
  char* assign = malloc(strlen(out_dir) + 16);
  sprintf(assign, "output=%s", out_dir);
  EXPECT_OK(pb_config_set(cfg, assign));
  free(assign);
  EXPECT(pb_config_set(cfg, "nonsense") == PB_ERR_PARSE);
  EXPECT_OK(pb_config_validate(cfg));
  char* cfg_text = NULL;
  EXPECT_OK(pb_config_text(cfg, &cfg_text));
  EXPECT(cfg_text != NULL && strstr(cfg_text, "[dataset syn]") != NULL);
  pb_string_free(cfg_text);

  pb_run_info info;
  int lines = 0;
  EXPECT_OK(pb_benchmark_run(cfg, -1, CountLines, &lines, &info));
  EXPECT(info.cells_total == 1 && info.cells_computed == 1 && !info.interrupted);
  EXPECT(lines >= 1);
  EXPECT_OK(pb_benchmark_run(cfg, -1, NULL, NULL, &info));
  EXPECT(info.cells_reused == 1);
  pb_config_free(cfg);

  char* records = Join(out_dir, "records.csv");
  char* splits = Join(out_dir, "splits.csv");
  char* rebuilt = Join(dir, "capi_rebuilt");
  EXPECT_OK(pb_report_from_records(records, splits, rebuilt));
  EXPECT(pb_report_from_records("/nonexistent/records.csv", NULL, rebuilt) == PB_ERR_IO);

  free(records);
  free(splits);
  free(rebuilt);
  free(csv);
  free(scores_path);
  free(out_dir);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
