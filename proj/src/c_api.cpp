// Copyright 2026 The rtdtopo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rtdtopo/rtdtopo.h"

#include <cmath>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "rtdtopo/errors.hpp"
#include "rtdtopo/fewshot.hpp"
#include "rtdtopo/io.hpp"
#include "rtdtopo/persistence.hpp"
#include "rtdtopo/rtd.hpp"
#include "rtdtopo/rtd_grad.hpp"

struct rtdtopo_cloud {
  rtdtopo::PointCloud cloud;
};
struct rtdtopo_barcode {
  rtdtopo::Barcode barcode;
};
struct rtdtopo_rtd_report {
  double score;
  rtdtopo_barcode forward;
  rtdtopo_barcode backward;
};
struct rtdtopo_dataset {
  rtdtopo::EmbeddingDataset ds;
};
struct rtdtopo_classifier {
  rtdtopo::BaseClassifier base;
};
struct rtdtopo_model {
  rtdtopo::TaskResidualModel model;
};
struct rtdtopo_history {
  std::vector<rtdtopo::EpochMetrics> epochs;
};
struct rtdtopo_manifest {
  rtdtopo::Manifest manifest;
  std::string paths[4];
};

namespace {

thread_local std::string g_last_error;

rtdtopo_status fail(rtdtopo_status status, const char* what) {
  g_last_error = what;
  return status;
}

rtdtopo_status status_of(rtdtopo::ErrorKind kind) {
  switch (kind) {
    case rtdtopo::ErrorKind::kInvalidArgument: return RTDTOPO_ERR_INVALID_ARGUMENT;
    case rtdtopo::ErrorKind::kData: return RTDTOPO_ERR_DATA;
    case rtdtopo::ErrorKind::kNumeric: return RTDTOPO_ERR_NUMERIC;
    case rtdtopo::ErrorKind::kIo: return RTDTOPO_ERR_IO;
  }
  return RTDTOPO_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
rtdtopo_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RTDTOPO_OK;
  } catch (const rtdtopo::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RTDTOPO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RTDTOPO_ERR_INTERNAL, e.what());
  }
}

template <typename... Ptrs>
void require(Ptrs... ptrs) {
  if (((ptrs == nullptr) || ...)) throw rtdtopo::InvalidArgument("null argument");
}

rtdtopo::TrainConfig to_cpp(const rtdtopo_train_config& c) {
  rtdtopo::TrainConfig out;
  out.shots = c.shots;
  out.epochs = c.epochs;
  out.lr = c.lr;
  out.lambda = c.lambda;
  out.alpha = c.alpha;
  out.logit_scale = c.logit_scale;
  out.seed = c.seed;
  out.lambda_search = c.lambda_search != 0;
  out.band_lower = c.band_lower;
  out.band_upper = c.band_upper;
  return out;
}

rtdtopo_train_config to_c(const rtdtopo::TrainConfig& c) {
  return {c.shots,       c.epochs, c.lr,           c.lambda,        c.alpha,
          c.logit_scale, c.seed,   c.lambda_search, c.band_lower, c.band_upper};
}

void fill_simplex(const rtdtopo::Simplex& s, uint32_t* out, int* size) {
  for (int k = 0; k < s.count; ++k) out[k] = s.vertices[k];
  *size = s.count;
}

void write_file(const char* path, const auto& writer) {
  std::ofstream out(path);
  if (!out) throw rtdtopo::IoError(std::string("cannot write ") + path);
  writer(out);
  if (!out) throw rtdtopo::IoError(std::string("failed writing ") + path);
}

}  // namespace

extern "C" {

const char* rtdtopo_version(void) { return "0.1.0"; }

const char* rtdtopo_last_error(void) { return g_last_error.c_str(); }

rtdtopo_status rtdtopo_cloud_create(const double* coords, size_t n, size_t d,
                                    rtdtopo_cloud** out) {
  return guarded([&] {
    require(coords, out);
    rtdtopo::Matrix m(n, d, std::vector<double>(coords, coords + n * d));
    *out = new rtdtopo_cloud{rtdtopo::PointCloud(std::move(m))};
  });
}

rtdtopo_status rtdtopo_cloud_load_csv(const char* path, rtdtopo_cloud** out) {
  return guarded([&] {
    require(path, out);
    *out = new rtdtopo_cloud{rtdtopo::load_point_cloud_csv(path)};
  });
}

rtdtopo_status rtdtopo_cloud_save_csv(const rtdtopo_cloud* cloud, const char* path) {
  return guarded([&] {
    require(cloud, path);
    const auto& m = cloud->cloud.points();
    write_file(path, [&](std::ostream& os) {
      for (std::size_t k = 0; k < m.cols(); ++k) os << (k ? ",x" : "x") << k;
      os << '\n';
      for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t k = 0; k < m.cols(); ++k) {
          os << (k ? "," : "") << rtdtopo::format_double(m(r, k));
        }
        os << '\n';
      }
    });
  });
}

size_t rtdtopo_cloud_size(const rtdtopo_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

size_t rtdtopo_cloud_dim(const rtdtopo_cloud* cloud) { return cloud ? cloud->cloud.dim() : 0; }

rtdtopo_status rtdtopo_cloud_copy_coords(const rtdtopo_cloud* cloud, double* out,
                                         size_t capacity) {
  return guarded([&] {
    require(cloud, out);
    auto values = cloud->cloud.points().values();
    if (capacity < values.size()) throw rtdtopo::InvalidArgument("output buffer too small");
    std::copy(values.begin(), values.end(), out);
  });
}

void rtdtopo_cloud_free(rtdtopo_cloud* cloud) { delete cloud; }

rtdtopo_status rtdtopo_vr_barcode(const rtdtopo_cloud* cloud, int max_dim,
                                  rtdtopo_barcode** out) {
  return guarded([&] {
    require(cloud, out);
    const auto fc =
        rtdtopo::build_vr_filtration(rtdtopo::pairwise_distances(cloud->cloud), max_dim);
    *out = new rtdtopo_barcode{rtdtopo::compute_persistence(fc)};
  });
}

rtdtopo_status rtdtopo_h0_barcode(const rtdtopo_cloud* cloud, rtdtopo_barcode** out) {
  return guarded([&] {
    require(cloud, out);
    *out = new rtdtopo_barcode{
        rtdtopo::zero_dim_persistence(rtdtopo::pairwise_distances(cloud->cloud))};
  });
}

rtdtopo_status rtdtopo_cross_barcode(const rtdtopo_cloud* p, const rtdtopo_cloud* q,
                                     rtdtopo_barcode** out) {
  return guarded([&] {
    require(p, q, out);
    *out = new rtdtopo_barcode{rtdtopo::cross_barcode(p->cloud, q->cloud)};
  });
}

rtdtopo_status rtdtopo_mtop_div(const rtdtopo_cloud* p, const rtdtopo_cloud* q, double* out) {
  return guarded([&] {
    require(p, q, out);
    *out = rtdtopo::mtop_div(p->cloud, q->cloud);
  });
}

size_t rtdtopo_barcode_count(const rtdtopo_barcode* bc) {
  return bc ? bc->barcode.pairs.size() : 0;
}

rtdtopo_status rtdtopo_barcode_get(const rtdtopo_barcode* bc, size_t index, rtdtopo_bar* out) {
  return guarded([&] {
    require(bc, out);
    if (index >= bc->barcode.pairs.size()) throw rtdtopo::InvalidArgument("bar index out of range");
    const auto& p = bc->barcode.pairs[index];
    rtdtopo_bar bar{};
    bar.dim = p.dim;
    bar.birth = p.birth;
    bar.death = p.death;
    fill_simplex(p.birth_simplex, bar.birth_simplex, &bar.birth_size);
    if (p.death_simplex) fill_simplex(*p.death_simplex, bar.death_simplex, &bar.death_size);
    *out = bar;
  });
}

size_t rtdtopo_barcode_betti(const rtdtopo_barcode* bc, int dim, double eps) {
  return bc ? rtdtopo::betti_at(bc->barcode, dim, eps) : 0;
}

rtdtopo_status rtdtopo_barcode_save_csv(const rtdtopo_barcode* bc, const char* path) {
  return guarded([&] {
    require(bc, path);
    write_file(path, [&](std::ostream& os) { rtdtopo::write_barcode_csv(os, bc->barcode); });
  });
}

void rtdtopo_barcode_free(rtdtopo_barcode* bc) { delete bc; }

rtdtopo_status rtdtopo_rtd(const rtdtopo_cloud* p, const rtdtopo_cloud* pt,
                           rtdtopo_rtd_report** out) {
  return guarded([&] {
    require(p, pt, out);
    auto r = rtdtopo::rtd_score(p->cloud, pt->cloud);
    *out = new rtdtopo_rtd_report{r.score, {std::move(r.forward.barcode)},
                                  {std::move(r.backward.barcode)}};
  });
}

double rtdtopo_rtd_report_score(const rtdtopo_rtd_report* report) {
  return report ? report->score : std::nan("");
}

const rtdtopo_barcode* rtdtopo_rtd_report_barcode(const rtdtopo_rtd_report* report,
                                                  int direction) {
  if (!report) return nullptr;
  if (direction == 0) return &report->forward;
  if (direction == 1) return &report->backward;
  return nullptr;
}

void rtdtopo_rtd_report_free(rtdtopo_rtd_report* report) { delete report; }

rtdtopo_status rtdtopo_rtd_gradient(const rtdtopo_cloud* p, const rtdtopo_cloud* pt,
                                    double* grad_p, double* grad_pt, double* score) {
  return guarded([&] {
    require(p, pt, grad_p, grad_pt);
    const auto r = rtdtopo::rtd_subgradient(p->cloud, pt->cloud);
    auto gp = r.gradient.grad_p.values();
    auto gq = r.gradient.grad_pt.values();
    std::copy(gp.begin(), gp.end(), grad_p);
    std::copy(gq.begin(), gq.end(), grad_pt);
    if (score) *score = r.report.score;
  });
}

rtdtopo_status rtdtopo_grad_check(const rtdtopo_cloud* p, const rtdtopo_cloud* pt, double h,
                                  int trials, uint64_t seed, rtdtopo_grad_check_result* out) {
  return guarded([&] {
    require(p, pt, out);
    const auto r = rtdtopo::finite_difference_check(p->cloud, pt->cloud, h, trials, seed);
    *out = {r.max_rel_error, r.tie_gap, r.directions};
  });
}

rtdtopo_status rtdtopo_descend(const rtdtopo_cloud* p, const rtdtopo_cloud* pt, int steps,
                               double lr, rtdtopo_cloud** out, double* initial_score,
                               double* final_score) {
  return guarded([&] {
    require(p, pt, out);
    auto trace = rtdtopo::descend_rtd(p->cloud, pt->cloud, steps, lr);
    if (initial_score) {
      *initial_score = steps > 0 ? trace.scores.front()
                                 : rtdtopo::rtd_score(p->cloud, pt->cloud).score;
    }
    if (final_score) *final_score = trace.scores.back();
    *out = new rtdtopo_cloud{std::move(trace.result)};
  });
}

void rtdtopo_train_config_default(rtdtopo_train_config* config) {
  if (config) *config = to_c(rtdtopo::TrainConfig{});
}

void rtdtopo_synthetic_params_default(rtdtopo_synthetic_params* params) {
  if (!params) return;
  const rtdtopo::SyntheticParams d;
  *params = {d.classes, d.train_shots, d.test_shots, d.dim, d.cluster_spread, d.modality_gap,
             d.seed};
}

rtdtopo_status rtdtopo_dataset_load_csv(const char* path, int class_count,
                                        rtdtopo_dataset** out) {
  return guarded([&] {
    require(path, out);
    *out = new rtdtopo_dataset{rtdtopo::load_embeddings_csv(path, class_count)};
  });
}

rtdtopo_status rtdtopo_dataset_save_csv(const rtdtopo_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, path);
    write_file(path, [&](std::ostream& os) { rtdtopo::write_embeddings_csv(os, ds->ds); });
  });
}

size_t rtdtopo_dataset_size(const rtdtopo_dataset* ds) { return ds ? ds->ds.size() : 0; }

size_t rtdtopo_dataset_dim(const rtdtopo_dataset* ds) { return ds ? ds->ds.dim() : 0; }

int rtdtopo_dataset_class_count(const rtdtopo_dataset* ds) { return ds ? ds->ds.class_count : 0; }

void rtdtopo_dataset_free(rtdtopo_dataset* ds) { delete ds; }

rtdtopo_status rtdtopo_classifier_load_csv(const char* path, rtdtopo_classifier** out) {
  return guarded([&] {
    require(path, out);
    *out = new rtdtopo_classifier{rtdtopo::load_classifier_csv(path)};
  });
}

rtdtopo_status rtdtopo_classifier_save_csv(const rtdtopo_classifier* base, const char* path) {
  return guarded([&] {
    require(base, path);
    write_file(path, [&](std::ostream& os) {
      rtdtopo::write_class_matrix_csv(os, base->base.text_weights());
    });
  });
}

int rtdtopo_classifier_class_count(const rtdtopo_classifier* base) {
  return base ? base->base.class_count() : 0;
}

void rtdtopo_classifier_free(rtdtopo_classifier* base) { delete base; }

rtdtopo_status rtdtopo_gen_synthetic(const rtdtopo_synthetic_params* params,
                                     rtdtopo_dataset** train, rtdtopo_dataset** test,
                                     rtdtopo_classifier** base) {
  return guarded([&] {
    require(params, train, test, base);
    rtdtopo::SyntheticParams p;
    p.classes = params->classes;
    p.train_shots = params->train_shots;
    p.test_shots = params->test_shots;
    p.dim = params->dim;
    p.cluster_spread = params->cluster_spread;
    p.modality_gap = params->modality_gap;
    p.seed = params->seed;
    auto data = rtdtopo::gen_synthetic(p);
    auto* tr = new rtdtopo_dataset{std::move(data.train)};
    auto* te = new rtdtopo_dataset{std::move(data.test)};
    *base = new rtdtopo_classifier{std::move(data.base)};
    *train = tr;
    *test = te;
  });
}

rtdtopo_status rtdtopo_lambda_search(const rtdtopo_dataset* train, const rtdtopo_classifier* base,
                                     const rtdtopo_train_config* config,
                                     rtdtopo_lambda_result* out) {
  return guarded([&] {
    require(train, base, config, out);
    const auto r = rtdtopo::lambda_search(train->ds, base->base, to_cpp(*config));
    *out = {r.lambda, r.ratio, r.initial_ce, r.initial_rtd, r.rtd_vanished ? 1 : 0,
            r.iterations};
  });
}

rtdtopo_status rtdtopo_train(const rtdtopo_dataset* train, const rtdtopo_classifier* base,
                             const rtdtopo_train_config* config, rtdtopo_model** model,
                             rtdtopo_history** history, double* lambda_used) {
  return guarded([&] {
    require(train, base, config, model);
    auto r = rtdtopo::train(train->ds, base->base, to_cpp(*config));
    if (history) *history = new rtdtopo_history{std::move(r.history)};
    if (lambda_used) *lambda_used = r.lambda;
    *model = new rtdtopo_model{std::move(r.model)};
  });
}

size_t rtdtopo_history_count(const rtdtopo_history* history) {
  return history ? history->epochs.size() : 0;
}

rtdtopo_status rtdtopo_history_get(const rtdtopo_history* history, size_t index,
                                   rtdtopo_epoch_metrics* out) {
  return guarded([&] {
    require(history, out);
    if (index >= history->epochs.size()) throw rtdtopo::InvalidArgument("epoch index out of range");
    const auto& m = history->epochs[index];
    *out = {m.epoch, m.ce, m.rtd, m.total, m.train_accuracy};
  });
}

rtdtopo_status rtdtopo_history_save_csv(const rtdtopo_history* history, const char* path) {
  return guarded([&] {
    require(history, path);
    write_file(path, [&](std::ostream& os) { rtdtopo::write_metrics_csv(os, history->epochs); });
  });
}

void rtdtopo_history_free(rtdtopo_history* history) { delete history; }

rtdtopo_status rtdtopo_model_create(const rtdtopo_classifier* base, double alpha,
                                    double logit_scale, rtdtopo_model** out) {
  return guarded([&] {
    require(base, out);
    *out = new rtdtopo_model{rtdtopo::TaskResidualModel(base->base, alpha, logit_scale)};
  });
}

rtdtopo_status rtdtopo_model_load_residual_csv(rtdtopo_model* model, const char* path) {
  return guarded([&] {
    require(model, path);
    auto residual = rtdtopo::load_class_matrix_csv(path);
    const auto& cur = model->model.residual;
    if (residual.rows() != cur.rows() || residual.cols() != cur.cols()) {
      throw rtdtopo::DataError(std::string(path) + ": residual shape does not match classifier");
    }
    model->model.residual = std::move(residual);
  });
}

rtdtopo_status rtdtopo_model_save_residual_csv(const rtdtopo_model* model, const char* path) {
  return guarded([&] {
    require(model, path);
    write_file(path, [&](std::ostream& os) {
      rtdtopo::write_class_matrix_csv(os, model->model.residual);
    });
  });
}

rtdtopo_status rtdtopo_evaluate(const rtdtopo_model* model, const rtdtopo_dataset* test,
                                double* accuracy) {
  return guarded([&] {
    require(model, test, accuracy);
    *accuracy = rtdtopo::evaluate(model->model, test->ds);
  });
}

void rtdtopo_model_free(rtdtopo_model* model) { delete model; }

rtdtopo_status rtdtopo_manifest_load(const char* path, rtdtopo_manifest** out) {
  return guarded([&] {
    require(path, out);
    auto m = rtdtopo::load_manifest(path);
    auto* h = new rtdtopo_manifest{m, {m.train.string(), m.test.string(), m.base.string(),
                                       m.output_dir.string()}};
    *out = h;
  });
}

const char* rtdtopo_manifest_path(const rtdtopo_manifest* manifest, rtdtopo_manifest_field field) {
  if (!manifest || field < RTDTOPO_MANIFEST_TRAIN || field > RTDTOPO_MANIFEST_OUTPUT_DIR) {
    return nullptr;
  }
  return manifest->paths[field].c_str();
}

void rtdtopo_manifest_config(const rtdtopo_manifest* manifest, rtdtopo_train_config* out) {
  if (manifest && out) *out = to_c(manifest->manifest.config);
}

rtdtopo_status rtdtopo_manifest_save(const char* path, const char* train, const char* test,
                                     const char* base, const char* output_dir,
                                     const rtdtopo_train_config* config) {
  return guarded([&] {
    require(path, train, test, base, output_dir, config);
    rtdtopo::Manifest m{train, test, base, output_dir, to_cpp(*config)};
    m.config.validate();
    rtdtopo::write_text_file(path, rtdtopo::manifest_to_json(m));
  });
}

void rtdtopo_manifest_free(rtdtopo_manifest* manifest) { delete manifest; }

}  // extern "C"
