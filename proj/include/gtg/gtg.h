/*
 * Copyright 2026 The GraphTreeGen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef GTG_GTG_H_
#define GTG_GTG_H_

/*
 * C interface of libgtg. Objects are opaque handles released with their
 * matching *_free function. Every call returns a gtg_status; on failure the
 * message is available from gtg_last_error() on the same thread until the
 * next call. Strings returned through char** are released with
 * gtg_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GTG_API __declspec(dllexport)
#else
#define GTG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..5 double as CLI exit codes. */
typedef enum gtg_status {
  GTG_OK = 0,
  GTG_ERR_INTERNAL = 1,
  GTG_ERR_CONFIG = 2,     /* bad argument, config, shape or graph */
  GTG_ERR_IO = 3,
  GTG_ERR_DIVERGENCE = 4, /* non-finite gradient during training */
  GTG_ERR_CHECK = 5,      /* a self-check did not pass */
  GTG_ERR_NUMERIC = 6     /* singular system, no convergence */
} gtg_status;

typedef struct gtg_graph gtg_graph;
typedef struct gtg_model gtg_model;
typedef struct gtg_prediction gtg_prediction;

typedef void (*gtg_progress_fn)(const char* line, void* user);

GTG_API const char* gtg_version(void);
GTG_API const char* gtg_last_error(void);
GTG_API void gtg_string_free(char* s);

/* --- graphs */

GTG_API gtg_status gtg_graph_load(const char* path, gtg_graph** out);
/* Row-major n*n copy of `values`; validated like a loaded file. */
GTG_API gtg_status gtg_graph_from_dense(size_t n, const double* values, gtg_graph** out);
GTG_API gtg_status gtg_graph_save(const gtg_graph* g, const char* path);
GTG_API size_t gtg_graph_size(const gtg_graph* g);
/* Copies n*n values into out; len is the capacity of out. */
GTG_API gtg_status gtg_graph_copy_dense(const gtg_graph* g, double* out, size_t len);
GTG_API void gtg_graph_free(gtg_graph* g);

/* JSON with the entropy ranking and the m k-hop subtrees. */
GTG_API gtg_status gtg_subtrees_json(const gtg_graph* g, size_t m, size_t k, char** out_json);

/* --- synthetic data */

typedef struct gtg_synth_options {
  const char* config_path; /* run config whose "synth" section is used; may be NULL */
  const char* out_dir;
  int64_t n_graphs;        /* overrides when >= 0 */
  int has_seed;
  uint64_t seed;
} gtg_synth_options;

GTG_API gtg_status gtg_synth_write(const gtg_synth_options* opts, size_t* n_written);

/* --- training */

typedef struct gtg_train_options {
  const char* config_path; /* required */
  const char* mode;        /* "self_supervised" | "supervised" | "overfit"; NULL keeps the config's */
  const char* data_root;   /* NULL keeps the config's */
  const char* out_dir;     /* NULL keeps the config's */
  int has_seed;
  uint64_t seed;
  size_t fold;             /* validation fold, 0 means 1 */
  gtg_progress_fn progress;
  void* user;
} gtg_train_options;

/* Writes checkpoint.json, history.csv and folds.json. final_val_mae may be NULL. */
GTG_API gtg_status gtg_train_run(const gtg_train_options* opts, double* final_val_mae);

/* --- inference */

GTG_API gtg_status gtg_model_load(const char* checkpoint_path, gtg_model** out);
GTG_API size_t gtg_model_nodes(const gtg_model* m);
GTG_API gtg_status gtg_model_save(const gtg_model* m, const char* checkpoint_path);
GTG_API void gtg_model_free(gtg_model* m);

GTG_API gtg_status gtg_model_predict(const gtg_model* m, const gtg_graph* source, gtg_prediction** out);
/* fused.csv, weights.csv and logits.csv inside dir. */
GTG_API gtg_status gtg_prediction_save(const gtg_prediction* p, const char* dir);
GTG_API gtg_status gtg_prediction_fused(const gtg_prediction* p, gtg_graph** out);
GTG_API void gtg_prediction_free(gtg_prediction* p);

/* --- evaluation */

#define GTG_METRIC_COUNT 10

/* Column name of metric i, in report order; NULL when out of range. */
GTG_API const char* gtg_metric_name(size_t i);

/* Failed metrics are NaN. */
GTG_API gtg_status gtg_metrics(const gtg_graph* pred, const gtg_graph* target, double out[GTG_METRIC_COUNT]);

typedef struct gtg_evaluate_options {
  const char* checkpoint;  /* exactly one of checkpoint / predictions_dir */
  const char* predictions_dir;
  const char* data_root;
  const char* split;       /* "test" when NULL */
  const char* which;       /* "fused" when NULL */
  const char* out_path;
  gtg_progress_fn progress;
  void* user;
} gtg_evaluate_options;

/* Writes the report CSV; mean_mae (may be NULL) receives the mean edge MAE. */
GTG_API gtg_status gtg_evaluate(const gtg_evaluate_options* opts, double* mean_mae);

/* --- self-checks */

/* Whole-model central-difference gradient check on the tiny configuration. */
GTG_API gtg_status gtg_gradcheck_tiny(double h, uint64_t seed, double* max_rel_error);

/* Testing hook: 0 restores the correct backward rules, 1 corrupts the
 * sigmoid backward rule. */
GTG_API gtg_status gtg_debug_set_fault(int fault);

#ifdef __cplusplus
}
#endif

#endif /* GTG_GTG_H_ */
