/*
 * Copyright 2026 The rtdtopo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to librtdtopo.
 *
 * Every object is an opaque handle created by a `*_create`, `*_load` or
 * computing function and released by the matching `*_free`. Functions that
 * can fail return an rtdtopo_status; on failure the thread-local message
 * from rtdtopo_last_error() describes the cause and output handles are left
 * untouched. Handles are immutable after creation unless a function says
 * otherwise, and may be shared across threads for reading.
 */
#ifndef RTDTOPO_RTDTOPO_H_
#define RTDTOPO_RTDTOPO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RTDTOPO_BUILDING_LIBRARY)
#    define RTDTOPO_API __declspec(dllexport)
#  else
#    define RTDTOPO_API __declspec(dllimport)
#  endif
#else
#  define RTDTOPO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rtdtopo_status {
  RTDTOPO_OK = 0,
  RTDTOPO_ERR_INVALID_ARGUMENT = 1,
  RTDTOPO_ERR_DATA = 2,
  RTDTOPO_ERR_NUMERIC = 3,
  RTDTOPO_ERR_IO = 4,
  RTDTOPO_ERR_INTERNAL = 5
} rtdtopo_status;

typedef struct rtdtopo_cloud rtdtopo_cloud;
typedef struct rtdtopo_barcode rtdtopo_barcode;
typedef struct rtdtopo_rtd_report rtdtopo_rtd_report;
typedef struct rtdtopo_dataset rtdtopo_dataset;
typedef struct rtdtopo_classifier rtdtopo_classifier;
typedef struct rtdtopo_model rtdtopo_model;
typedef struct rtdtopo_history rtdtopo_history;
typedef struct rtdtopo_manifest rtdtopo_manifest;

/* One persistence interval. `death` is +infinity for essential classes, in
 * which case death_size is 0. Simplices list vertex indices, size = dim + 1. */
typedef struct rtdtopo_bar {
  int dim;
  double birth;
  double death;
  uint32_t birth_simplex[3];
  int birth_size;
  uint32_t death_simplex[3];
  int death_size;
} rtdtopo_bar;

typedef struct rtdtopo_train_config {
  int shots;
  int epochs;
  double lr;
  double lambda;
  double alpha;
  double logit_scale;
  uint64_t seed;
  int lambda_search;
  double band_lower;
  double band_upper;
} rtdtopo_train_config;

typedef struct rtdtopo_synthetic_params {
  int classes;
  int train_shots;
  int test_shots;
  int dim;
  double cluster_spread;
  double modality_gap;
  uint64_t seed;
} rtdtopo_synthetic_params;

typedef struct rtdtopo_epoch_metrics {
  int epoch;
  double ce;
  double rtd;
  double total;
  double train_accuracy;
} rtdtopo_epoch_metrics;

typedef struct rtdtopo_lambda_result {
  double lambda;
  double ratio;
  double initial_ce;
  double initial_rtd;
  int rtd_vanished;
  int iterations;
} rtdtopo_lambda_result;

typedef struct rtdtopo_grad_check_result {
  double max_rel_error;
  double tie_gap;
  int directions;
} rtdtopo_grad_check_result;

typedef enum rtdtopo_manifest_field {
  RTDTOPO_MANIFEST_TRAIN = 0,
  RTDTOPO_MANIFEST_TEST = 1,
  RTDTOPO_MANIFEST_BASE = 2,
  RTDTOPO_MANIFEST_OUTPUT_DIR = 3
} rtdtopo_manifest_field;

RTDTOPO_API const char* rtdtopo_version(void);
/* Message for the last failed call on this thread, or "" if none. */
RTDTOPO_API const char* rtdtopo_last_error(void);

/* ---- point clouds ---------------------------------------------------- */

/* coords is row-major n x d. */
RTDTOPO_API rtdtopo_status rtdtopo_cloud_create(const double* coords, size_t n, size_t d,
                                                rtdtopo_cloud** out);
RTDTOPO_API rtdtopo_status rtdtopo_cloud_load_csv(const char* path, rtdtopo_cloud** out);
RTDTOPO_API rtdtopo_status rtdtopo_cloud_save_csv(const rtdtopo_cloud* cloud, const char* path);
RTDTOPO_API size_t rtdtopo_cloud_size(const rtdtopo_cloud* cloud);
RTDTOPO_API size_t rtdtopo_cloud_dim(const rtdtopo_cloud* cloud);
/* Copies n * d coordinates; capacity is in doubles. */
RTDTOPO_API rtdtopo_status rtdtopo_cloud_copy_coords(const rtdtopo_cloud* cloud, double* out,
                                                     size_t capacity);
RTDTOPO_API void rtdtopo_cloud_free(rtdtopo_cloud* cloud);

/* ---- barcodes -------------------------------------------------------- */

/* Vietoris-Rips barcode of a cloud, max_dim in {1, 2}. */
RTDTOPO_API rtdtopo_status rtdtopo_vr_barcode(const rtdtopo_cloud* cloud, int max_dim,
                                              rtdtopo_barcode** out);
/* H0 only, via union-find. */
RTDTOPO_API rtdtopo_status rtdtopo_h0_barcode(const rtdtopo_cloud* cloud, rtdtopo_barcode** out);
RTDTOPO_API rtdtopo_status rtdtopo_cross_barcode(const rtdtopo_cloud* p, const rtdtopo_cloud* q,
                                                 rtdtopo_barcode** out);
RTDTOPO_API rtdtopo_status rtdtopo_mtop_div(const rtdtopo_cloud* p, const rtdtopo_cloud* q,
                                            double* out);
RTDTOPO_API size_t rtdtopo_barcode_count(const rtdtopo_barcode* bc);
RTDTOPO_API rtdtopo_status rtdtopo_barcode_get(const rtdtopo_barcode* bc, size_t index,
                                               rtdtopo_bar* out);
RTDTOPO_API size_t rtdtopo_barcode_betti(const rtdtopo_barcode* bc, int dim, double eps);
/* Columns dim,birth,death; infinite deaths written as `inf`. */
RTDTOPO_API rtdtopo_status rtdtopo_barcode_save_csv(const rtdtopo_barcode* bc, const char* path);
RTDTOPO_API void rtdtopo_barcode_free(rtdtopo_barcode* bc);

/* ---- representation topology divergence ------------------------------ */

RTDTOPO_API rtdtopo_status rtdtopo_rtd(const rtdtopo_cloud* p, const rtdtopo_cloud* pt,
                                       rtdtopo_rtd_report** out);
RTDTOPO_API double rtdtopo_rtd_report_score(const rtdtopo_rtd_report* report);
/* direction 0: R-Cross-Barcode(P, Pt); 1: R-Cross-Barcode(Pt, P). The
 * returned handle is owned by the report and must not be freed. */
RTDTOPO_API const rtdtopo_barcode* rtdtopo_rtd_report_barcode(const rtdtopo_rtd_report* report,
                                                              int direction);
RTDTOPO_API void rtdtopo_rtd_report_free(rtdtopo_rtd_report* report);

/* grad_p and grad_pt receive n * d doubles each (row-major). score may be
 * NULL. */
RTDTOPO_API rtdtopo_status rtdtopo_rtd_gradient(const rtdtopo_cloud* p, const rtdtopo_cloud* pt,
                                                double* grad_p, double* grad_pt, double* score);
RTDTOPO_API rtdtopo_status rtdtopo_grad_check(const rtdtopo_cloud* p, const rtdtopo_cloud* pt,
                                              double h, int trials, uint64_t seed,
                                              rtdtopo_grad_check_result* out);
/* Gradient descent on pt. Scores may be NULL. */
RTDTOPO_API rtdtopo_status rtdtopo_descend(const rtdtopo_cloud* p, const rtdtopo_cloud* pt,
                                           int steps, double lr, rtdtopo_cloud** out,
                                           double* initial_score, double* final_score);

/* ---- few-shot training ------------------------------------------------ */

RTDTOPO_API void rtdtopo_train_config_default(rtdtopo_train_config* config);
RTDTOPO_API void rtdtopo_synthetic_params_default(rtdtopo_synthetic_params* params);

/* class_count < 0 infers max(label) + 1. */
RTDTOPO_API rtdtopo_status rtdtopo_dataset_load_csv(const char* path, int class_count,
                                                    rtdtopo_dataset** out);
RTDTOPO_API rtdtopo_status rtdtopo_dataset_save_csv(const rtdtopo_dataset* ds, const char* path);
RTDTOPO_API size_t rtdtopo_dataset_size(const rtdtopo_dataset* ds);
RTDTOPO_API size_t rtdtopo_dataset_dim(const rtdtopo_dataset* ds);
RTDTOPO_API int rtdtopo_dataset_class_count(const rtdtopo_dataset* ds);
RTDTOPO_API void rtdtopo_dataset_free(rtdtopo_dataset* ds);

RTDTOPO_API rtdtopo_status rtdtopo_classifier_load_csv(const char* path,
                                                       rtdtopo_classifier** out);
RTDTOPO_API rtdtopo_status rtdtopo_classifier_save_csv(const rtdtopo_classifier* base,
                                                       const char* path);
RTDTOPO_API int rtdtopo_classifier_class_count(const rtdtopo_classifier* base);
RTDTOPO_API void rtdtopo_classifier_free(rtdtopo_classifier* base);

RTDTOPO_API rtdtopo_status rtdtopo_gen_synthetic(const rtdtopo_synthetic_params* params,
                                                 rtdtopo_dataset** train, rtdtopo_dataset** test,
                                                 rtdtopo_classifier** base);

RTDTOPO_API rtdtopo_status rtdtopo_lambda_search(const rtdtopo_dataset* train,
                                                 const rtdtopo_classifier* base,
                                                 const rtdtopo_train_config* config,
                                                 rtdtopo_lambda_result* out);

/* history and lambda_used may be NULL. */
RTDTOPO_API rtdtopo_status rtdtopo_train(const rtdtopo_dataset* train,
                                         const rtdtopo_classifier* base,
                                         const rtdtopo_train_config* config,
                                         rtdtopo_model** model, rtdtopo_history** history,
                                         double* lambda_used);

RTDTOPO_API size_t rtdtopo_history_count(const rtdtopo_history* history);
RTDTOPO_API rtdtopo_status rtdtopo_history_get(const rtdtopo_history* history, size_t index,
                                               rtdtopo_epoch_metrics* out);
/* Columns epoch,l_ce,l_rtd,l_total,train_acc. */
RTDTOPO_API rtdtopo_status rtdtopo_history_save_csv(const rtdtopo_history* history,
                                                    const char* path);
RTDTOPO_API void rtdtopo_history_free(rtdtopo_history* history);

/* Zero-residual model over a copy of base. */
RTDTOPO_API rtdtopo_status rtdtopo_model_create(const rtdtopo_classifier* base, double alpha,
                                                double logit_scale, rtdtopo_model** out);
/* Replaces the residual (mutates the model). */
RTDTOPO_API rtdtopo_status rtdtopo_model_load_residual_csv(rtdtopo_model* model,
                                                           const char* path);
RTDTOPO_API rtdtopo_status rtdtopo_model_save_residual_csv(const rtdtopo_model* model,
                                                           const char* path);
RTDTOPO_API rtdtopo_status rtdtopo_evaluate(const rtdtopo_model* model,
                                            const rtdtopo_dataset* test, double* accuracy);
RTDTOPO_API void rtdtopo_model_free(rtdtopo_model* model);

/* ---- run manifests ----------------------------------------------------- */

RTDTOPO_API rtdtopo_status rtdtopo_manifest_load(const char* path, rtdtopo_manifest** out);
/* Resolved path; owned by the manifest. */
RTDTOPO_API const char* rtdtopo_manifest_path(const rtdtopo_manifest* manifest,
                                              rtdtopo_manifest_field field);
RTDTOPO_API void rtdtopo_manifest_config(const rtdtopo_manifest* manifest,
                                         rtdtopo_train_config* out);
RTDTOPO_API rtdtopo_status rtdtopo_manifest_save(const char* path, const char* train,
                                                 const char* test, const char* base,
                                                 const char* output_dir,
                                                 const rtdtopo_train_config* config);
RTDTOPO_API void rtdtopo_manifest_free(rtdtopo_manifest* manifest);

#ifdef __cplusplus
}
#endif

#endif /* RTDTOPO_RTDTOPO_H_ */
