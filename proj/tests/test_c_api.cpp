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

// Exercises the shared library through its C interface only.

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "rtdtopo/rtdtopo.h"
#include "support/tempdir.hpp"

namespace {

rtdtopo_cloud* make_cloud(const std::vector<double>& xs, size_t n, size_t d) {
  rtdtopo_cloud* c = nullptr;
  REQUIRE(rtdtopo_cloud_create(xs.data(), n, d, &c) == RTDTOPO_OK);
  return c;
}

const std::vector<double> kSquare = {0, 0, 1, 0, 1, 1, 0, 1};

}  // namespace

TEST_SUITE("c_api") {

TEST_CASE("version and empty error") {
  CHECK(std::strlen(rtdtopo_version()) > 0);
  CHECK(rtdtopo_last_error() != nullptr);
}

TEST_CASE("clouds") {
  auto* c = make_cloud(kSquare, 4, 2);
  CHECK(rtdtopo_cloud_size(c) == 4);
  CHECK(rtdtopo_cloud_dim(c) == 2);
  std::vector<double> back(8);
  CHECK(rtdtopo_cloud_copy_coords(c, back.data(), back.size()) == RTDTOPO_OK);
  CHECK(back == kSquare);
  CHECK(rtdtopo_cloud_copy_coords(c, back.data(), 3) == RTDTOPO_ERR_INVALID_ARGUMENT);

  fixture::TempDir dir;
  const auto path = (dir / "c.csv").string();
  CHECK(rtdtopo_cloud_save_csv(c, path.c_str()) == RTDTOPO_OK);
  rtdtopo_cloud* loaded = nullptr;
  CHECK(rtdtopo_cloud_load_csv(path.c_str(), &loaded) == RTDTOPO_OK);
  CHECK(rtdtopo_cloud_size(loaded) == 4);
  rtdtopo_cloud_free(loaded);
  rtdtopo_cloud_free(c);
  rtdtopo_cloud_free(nullptr);
}

TEST_CASE("errors map to status codes and leave outputs alone") {
  rtdtopo_cloud* c = nullptr;
  const double bad[2] = {0.0, NAN};
  CHECK(rtdtopo_cloud_create(bad, 1, 2, &c) == RTDTOPO_ERR_INVALID_ARGUMENT);
  CHECK(c == nullptr);
  CHECK(std::string(rtdtopo_last_error()).find("non-finite") != std::string::npos);
  CHECK(rtdtopo_cloud_create(kSquare.data(), 4, 2, nullptr) == RTDTOPO_ERR_INVALID_ARGUMENT);
  CHECK(rtdtopo_cloud_load_csv("/nonexistent.csv", &c) == RTDTOPO_ERR_IO);
  fixture::TempDir dir;
  auto path = dir.write("bad.csv", "x\nhello\n").string();
  CHECK(rtdtopo_cloud_load_csv(path.c_str(), &c) == RTDTOPO_ERR_DATA);
  CHECK(c == nullptr);
}

TEST_CASE("barcodes") {
  auto* c = make_cloud(kSquare, 4, 2);
  rtdtopo_barcode* bc = nullptr;
  REQUIRE(rtdtopo_vr_barcode(c, 2, &bc) == RTDTOPO_OK);
  bool found = false;
  for (size_t i = 0; i < rtdtopo_barcode_count(bc); ++i) {
    rtdtopo_bar bar;
    REQUIRE(rtdtopo_barcode_get(bc, i, &bar) == RTDTOPO_OK);
    if (bar.dim == 1) {
      found = bar.birth == 1.0 && bar.death == std::sqrt(2.0) && bar.birth_size == 2 &&
              bar.death_size == 3;
    }
    if (std::isinf(bar.death)) CHECK(bar.death_size == 0);
  }
  CHECK(found);
  CHECK(rtdtopo_barcode_betti(bc, 1, 1.2) == 1);
  rtdtopo_bar bar;
  CHECK(rtdtopo_barcode_get(bc, 99, &bar) == RTDTOPO_ERR_INVALID_ARGUMENT);
  rtdtopo_barcode* h0 = nullptr;
  REQUIRE(rtdtopo_h0_barcode(c, &h0) == RTDTOPO_OK);
  CHECK(rtdtopo_barcode_betti(h0, 0, 0.5) == 4);
  CHECK(rtdtopo_barcode_betti(h0, 0, 1.0) == 1);
  rtdtopo_barcode* none = nullptr;
  CHECK(rtdtopo_vr_barcode(c, 3, &none) == RTDTOPO_ERR_INVALID_ARGUMENT);
  rtdtopo_barcode_free(h0);
  rtdtopo_barcode_free(bc);
  rtdtopo_cloud_free(c);
}

TEST_CASE("divergence and gradients") {
  auto* p = make_cloud(kSquare, 4, 2);
  std::vector<double> big = kSquare;
  for (double& v : big) v *= 10.0;
  auto* q = make_cloud(big, 4, 2);

  rtdtopo_rtd_report* self = nullptr;
  REQUIRE(rtdtopo_rtd(p, p, &self) == RTDTOPO_OK);
  CHECK(rtdtopo_rtd_report_score(self) == 0.0);
  rtdtopo_rtd_report_free(self);

  rtdtopo_rtd_report* rep = nullptr;
  REQUIRE(rtdtopo_rtd(p, q, &rep) == RTDTOPO_OK);
  const double score = rtdtopo_rtd_report_score(rep);
  CHECK(score > 0.0);
  CHECK(rtdtopo_rtd_report_barcode(rep, 0) != nullptr);
  CHECK(rtdtopo_rtd_report_barcode(rep, 2) == nullptr);

  std::vector<double> gp(8), gq(8);
  double s = -1;
  REQUIRE(rtdtopo_rtd_gradient(p, q, gp.data(), gq.data(), &s) == RTDTOPO_OK);
  CHECK(s == score);

  rtdtopo_cloud* out = nullptr;
  double before = 0, after = 0;
  REQUIRE(rtdtopo_descend(p, q, 0, 0.1, &out, &before, &after) == RTDTOPO_OK);
  CHECK(before == after);
  rtdtopo_cloud_free(out);

  double mtd = -1;
  REQUIRE(rtdtopo_mtop_div(p, p, &mtd) == RTDTOPO_OK);
  CHECK(mtd == 0.0);

  auto* three = make_cloud({0, 0, 1, 1, 2, 2}, 3, 2);
  rtdtopo_rtd_report* mismatch = nullptr;
  CHECK(rtdtopo_rtd(p, three, &mismatch) == RTDTOPO_ERR_INVALID_ARGUMENT);
  CHECK(mismatch == nullptr);

  rtdtopo_cloud_free(three);
  rtdtopo_rtd_report_free(rep);
  rtdtopo_cloud_free(q);
  rtdtopo_cloud_free(p);
}

TEST_CASE("synthetic training pipeline") {
  rtdtopo_synthetic_params params;
  rtdtopo_synthetic_params_default(&params);
  CHECK(params.classes == 10);
  params.classes = 4;
  params.dim = 8;
  params.train_shots = 4;
  params.test_shots = 10;
  rtdtopo_dataset *train = nullptr, *test = nullptr;
  rtdtopo_classifier* base = nullptr;
  REQUIRE(rtdtopo_gen_synthetic(&params, &train, &test, &base) == RTDTOPO_OK);
  CHECK(rtdtopo_dataset_size(train) == 16);
  CHECK(rtdtopo_dataset_dim(test) == 8);
  CHECK(rtdtopo_classifier_class_count(base) == 4);

  rtdtopo_train_config config;
  rtdtopo_train_config_default(&config);
  CHECK(config.lr == 1e-4);
  CHECK(config.band_lower == 0.33);
  config.epochs = 3;

  rtdtopo_lambda_result lr;
  REQUIRE(rtdtopo_lambda_search(train, base, &config, &lr) == RTDTOPO_OK);
  CHECK(lr.ratio >= 0.33);
  CHECK(lr.ratio <= 0.37);

  rtdtopo_model* model = nullptr;
  rtdtopo_history* history = nullptr;
  double lambda = 0;
  REQUIRE(rtdtopo_train(train, base, &config, &model, &history, &lambda) == RTDTOPO_OK);
  CHECK(lambda == lr.lambda);
  CHECK(rtdtopo_history_count(history) == 4);
  rtdtopo_epoch_metrics m;
  REQUIRE(rtdtopo_history_get(history, 3, &m) == RTDTOPO_OK);
  CHECK(m.epoch == 3);
  double acc = -1;
  REQUIRE(rtdtopo_evaluate(model, test, &acc) == RTDTOPO_OK);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);

  fixture::TempDir dir;
  const auto res = (dir / "residual.csv").string();
  const auto tr = (dir / "train.csv").string();
  const auto bs = (dir / "base.csv").string();
  const auto hs = (dir / "metrics.csv").string();
  REQUIRE(rtdtopo_model_save_residual_csv(model, res.c_str()) == RTDTOPO_OK);
  REQUIRE(rtdtopo_dataset_save_csv(test, tr.c_str()) == RTDTOPO_OK);
  REQUIRE(rtdtopo_classifier_save_csv(base, bs.c_str()) == RTDTOPO_OK);
  REQUIRE(rtdtopo_history_save_csv(history, hs.c_str()) == RTDTOPO_OK);
  CHECK(fixture::slurp(hs).rfind("epoch,l_ce,l_rtd,l_total,train_acc\n", 0) == 0);

  rtdtopo_classifier* base2 = nullptr;
  REQUIRE(rtdtopo_classifier_load_csv(bs.c_str(), &base2) == RTDTOPO_OK);
  rtdtopo_dataset* test2 = nullptr;
  REQUIRE(rtdtopo_dataset_load_csv(tr.c_str(), -1, &test2) == RTDTOPO_OK);
  rtdtopo_model* model2 = nullptr;
  REQUIRE(rtdtopo_model_create(base2, config.alpha, config.logit_scale, &model2) == RTDTOPO_OK);
  REQUIRE(rtdtopo_model_load_residual_csv(model2, res.c_str()) == RTDTOPO_OK);
  double acc2 = -1;
  REQUIRE(rtdtopo_evaluate(model2, test2, &acc2) == RTDTOPO_OK);
  CHECK(acc2 == acc);

  rtdtopo_train_config bad = config;
  bad.lr = -1;
  rtdtopo_model* none = nullptr;
  CHECK(rtdtopo_train(train, base, &bad, &none, nullptr, nullptr) == RTDTOPO_ERR_INVALID_ARGUMENT);
  CHECK(none == nullptr);

  rtdtopo_model_free(model2);
  rtdtopo_dataset_free(test2);
  rtdtopo_classifier_free(base2);
  rtdtopo_history_free(history);
  rtdtopo_model_free(model);
  rtdtopo_classifier_free(base);
  rtdtopo_dataset_free(test);
  rtdtopo_dataset_free(train);
}

TEST_CASE("manifests") {
  fixture::TempDir dir;
  rtdtopo_train_config config;
  rtdtopo_train_config_default(&config);
  config.epochs = 9;
  const auto path = (dir / "run.json").string();
  REQUIRE(rtdtopo_manifest_save(path.c_str(), "train.csv", "test.csv", "base.csv", "out",
                                &config) == RTDTOPO_OK);
  rtdtopo_manifest* m = nullptr;
  REQUIRE(rtdtopo_manifest_load(path.c_str(), &m) == RTDTOPO_OK);
  CHECK(std::string(rtdtopo_manifest_path(m, RTDTOPO_MANIFEST_TRAIN)) ==
        (dir / "train.csv").string());
  rtdtopo_train_config back;
  rtdtopo_manifest_config(m, &back);
  CHECK(back.epochs == 9);
  rtdtopo_manifest_free(m);
}

}
