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

// Command-line front end. Talks to the library only through the C API.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtdtopo/rtdtopo.h"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Carries a C status out of a subcommand.
struct Failure {
  rtdtopo_status status;
  std::string message;
};

void check(rtdtopo_status status) {
  if (status != RTDTOPO_OK) throw Failure{status, rtdtopo_last_error()};
}

int exit_code(rtdtopo_status status) {
  switch (status) {
    case RTDTOPO_OK: return kExitOk;
    case RTDTOPO_ERR_INVALID_ARGUMENT: return kExitUsage;
    case RTDTOPO_ERR_DATA:
    case RTDTOPO_ERR_IO: return kExitData;
    case RTDTOPO_ERR_NUMERIC:
    case RTDTOPO_ERR_INTERNAL: return kExitNumeric;
  }
  return kExitNumeric;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Cloud = std::unique_ptr<rtdtopo_cloud, Deleter<rtdtopo_cloud, rtdtopo_cloud_free>>;
using Barcode = std::unique_ptr<rtdtopo_barcode, Deleter<rtdtopo_barcode, rtdtopo_barcode_free>>;
using Report =
    std::unique_ptr<rtdtopo_rtd_report, Deleter<rtdtopo_rtd_report, rtdtopo_rtd_report_free>>;
using Dataset = std::unique_ptr<rtdtopo_dataset, Deleter<rtdtopo_dataset, rtdtopo_dataset_free>>;
using Classifier =
    std::unique_ptr<rtdtopo_classifier, Deleter<rtdtopo_classifier, rtdtopo_classifier_free>>;
using Model = std::unique_ptr<rtdtopo_model, Deleter<rtdtopo_model, rtdtopo_model_free>>;
using History = std::unique_ptr<rtdtopo_history, Deleter<rtdtopo_history, rtdtopo_history_free>>;
using ManifestHandle =
    std::unique_ptr<rtdtopo_manifest, Deleter<rtdtopo_manifest, rtdtopo_manifest_free>>;

std::string num(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Cloud load_cloud(const std::string& path) {
  rtdtopo_cloud* c = nullptr;
  check(rtdtopo_cloud_load_csv(path.c_str(), &c));
  return Cloud(c);
}

ManifestHandle load_manifest(const std::string& path) {
  rtdtopo_manifest* m = nullptr;
  check(rtdtopo_manifest_load(path.c_str(), &m));
  return ManifestHandle(m);
}

void print_barcode_csv(const rtdtopo_barcode* bc) {
  std::cout << "dim,birth,death\n";
  const size_t count = rtdtopo_barcode_count(bc);
  for (size_t i = 0; i < count; ++i) {
    rtdtopo_bar bar;
    check(rtdtopo_barcode_get(bc, i, &bar));
    std::cout << bar.dim << ',' << num(bar.birth) << ',' << num(bar.death) << '\n';
  }
}

json barcode_json(const rtdtopo_barcode* bc) {
  json bars = json::array();
  const size_t count = rtdtopo_barcode_count(bc);
  for (size_t i = 0; i < count; ++i) {
    rtdtopo_bar bar;
    check(rtdtopo_barcode_get(bc, i, &bar));
    json b;
    b["dim"] = bar.dim;
    b["birth"] = bar.birth;
    b["death"] = bar.death_size ? json(bar.death) : json("inf");
    b["birth_simplex"] = std::vector<uint32_t>(bar.birth_simplex, bar.birth_simplex + bar.birth_size);
    b["death_simplex"] = std::vector<uint32_t>(bar.death_simplex, bar.death_simplex + bar.death_size);
    bars.push_back(std::move(b));
  }
  return bars;
}

struct Inputs {
  Dataset train;
  Dataset test;
  Classifier base;
  rtdtopo_train_config config;
  fs::path output_dir;
};

Inputs load_inputs(const std::string& manifest_path, bool need_train, bool need_test) {
  auto manifest = load_manifest(manifest_path);
  Inputs in;
  rtdtopo_manifest_config(manifest.get(), &in.config);
  in.output_dir = rtdtopo_manifest_path(manifest.get(), RTDTOPO_MANIFEST_OUTPUT_DIR);
  rtdtopo_classifier* base = nullptr;
  check(rtdtopo_classifier_load_csv(rtdtopo_manifest_path(manifest.get(), RTDTOPO_MANIFEST_BASE),
                                    &base));
  in.base.reset(base);
  const int k = rtdtopo_classifier_class_count(base);
  auto load = [&](rtdtopo_manifest_field field) {
    rtdtopo_dataset* ds = nullptr;
    check(rtdtopo_dataset_load_csv(rtdtopo_manifest_path(manifest.get(), field), k, &ds));
    return Dataset(ds);
  };
  if (need_train) in.train = load(RTDTOPO_MANIFEST_TRAIN);
  if (need_test) in.test = load(RTDTOPO_MANIFEST_TEST);
  return in;
}

Model zero_shot_model(const Inputs& in) {
  rtdtopo_model* m = nullptr;
  check(rtdtopo_model_create(in.base.get(), in.config.alpha, in.config.logit_scale, &m));
  return Model(m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Representation topology divergence and topology-aware few-shot training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rtdtopo_version());

  // barcode
  std::string points_path;
  int max_dim = 2;
  bool h0_only = false;
  auto* barcode = app.add_subcommand("barcode", "Vietoris-Rips barcode of a point cloud as CSV");
  barcode->add_option("--points", points_path, "Point cloud CSV")->required();
  barcode->add_option("--maxdim", max_dim, "Largest simplex dimension (1 or 2)")
      ->capture_default_str();
  barcode->add_flag("--h0-only", h0_only, "Only H0, computed by union-find");

  // rtd
  std::string a_path, b_path;
  bool as_json = false;
  auto* rtd = app.add_subcommand("rtd", "RTD score between two corresponding clouds");
  rtd->add_option("--a", a_path, "First cloud CSV")->required();
  rtd->add_option("--b", b_path, "Second cloud CSV")->required();
  rtd->add_flag("--json", as_json, "Emit score and both directed barcodes as JSON");

  // crossbarcode
  std::string p_path, q_path;
  auto* cross = app.add_subcommand("crossbarcode", "H1 Cross-Barcode(P, Q) as CSV");
  cross->add_option("--p", p_path, "Cloud P CSV")->required();
  cross->add_option("--q", q_path, "Cloud Q CSV")->required();

  // grad-check
  double h = 1e-5;
  int trials = 20;
  double tolerance = 1e-3;
  double tie_threshold = 1e-6;
  std::uint64_t seed = 0;
  auto* grad = app.add_subcommand("grad-check", "Compare RTD subgradients with central differences");
  grad->add_option("--a", a_path, "First cloud CSV")->required();
  grad->add_option("--b", b_path, "Second cloud CSV")->required();
  grad->set_help_flag("--help", "Print this help message and exit");
  grad->add_option("--h", h, "Finite-difference step")->capture_default_str();
  grad->add_option("--trials", trials, "Random directions")->capture_default_str();
  grad->add_option("--tol", tolerance, "Maximum relative error")->capture_default_str();
  grad->add_option("--tie-gap", tie_threshold, "Refuse configurations closer to a tie")
      ->capture_default_str();
  grad->add_option("--seed", seed, "Seed for the directions")->capture_default_str();

  // gen-synthetic
  rtdtopo_synthetic_params synth;
  rtdtopo_synthetic_params_default(&synth);
  std::string out_dir;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic embedding task and manifest");
  gen->add_option("--k", synth.classes, "Classes")->capture_default_str();
  gen->add_option("--d", synth.dim, "Embedding dimension")->capture_default_str();
  gen->add_option("--shots", synth.train_shots, "Training samples per class")->capture_default_str();
  gen->add_option("--test-shots", synth.test_shots, "Test samples per class")->capture_default_str();
  gen->add_option("--spread", synth.cluster_spread, "Visual cluster spread")->capture_default_str();
  gen->add_option("--gap", synth.modality_gap, "Vision-text modality gap")->capture_default_str();
  gen->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  // lambda-search, train, eval
  std::string manifest_path, model_path;
  std::optional<std::uint64_t> seed_override;
  auto* search = app.add_subcommand("lambda-search", "Find lambda hitting the target loss ratio");
  search->add_option("--manifest", manifest_path, "Run manifest JSON")->required();
  search->add_option("--seed", seed_override, "Override the manifest seed");
  auto* train = app.add_subcommand("train", "Train the task residual and write outputs");
  train->add_option("--manifest", manifest_path, "Run manifest JSON")->required();
  train->add_option("--seed", seed_override, "Override the manifest seed");
  auto* eval = app.add_subcommand("eval", "Test accuracy of a saved residual");
  eval->add_option("--manifest", manifest_path, "Run manifest JSON")->required();
  eval->add_option("--model", model_path, "Residual CSV; omit for zero-shot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (barcode->parsed()) {
      auto cloud = load_cloud(points_path);
      rtdtopo_barcode* bc = nullptr;
      check(h0_only ? rtdtopo_h0_barcode(cloud.get(), &bc)
                    : rtdtopo_vr_barcode(cloud.get(), max_dim, &bc));
      Barcode owned(bc);
      print_barcode_csv(owned.get());
    } else if (rtd->parsed()) {
      auto a = load_cloud(a_path);
      auto b = load_cloud(b_path);
      rtdtopo_rtd_report* r = nullptr;
      check(rtdtopo_rtd(a.get(), b.get(), &r));
      Report report(r);
      const double score = rtdtopo_rtd_report_score(r);
      if (as_json) {
        json j;
        j["score"] = score;
        j["forward"] = barcode_json(rtdtopo_rtd_report_barcode(r, 0));
        j["backward"] = barcode_json(rtdtopo_rtd_report_barcode(r, 1));
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << num(score) << '\n';
      }
    } else if (cross->parsed()) {
      auto p = load_cloud(p_path);
      auto q = load_cloud(q_path);
      rtdtopo_barcode* bc = nullptr;
      check(rtdtopo_cross_barcode(p.get(), q.get(), &bc));
      Barcode owned(bc);
      print_barcode_csv(owned.get());
    } else if (grad->parsed()) {
      auto a = load_cloud(a_path);
      auto b = load_cloud(b_path);
      rtdtopo_grad_check_result r;
      check(rtdtopo_grad_check(a.get(), b.get(), h, trials, seed, &r));
      const bool near_tie = r.tie_gap < tie_threshold;
      const bool pass = !near_tie && r.max_rel_error <= tolerance;
      std::cout << "max_rel_error," << num(r.max_rel_error) << '\n'
                << "tie_gap," << num(r.tie_gap) << '\n'
                << "directions," << r.directions << '\n'
                << "result," << (near_tie ? "near-tie" : pass ? "pass" : "fail") << '\n';
      return pass ? kExitOk : kExitNumeric;
    } else if (gen->parsed()) {
      rtdtopo_dataset* tr = nullptr;
      rtdtopo_dataset* te = nullptr;
      rtdtopo_classifier* base = nullptr;
      check(rtdtopo_gen_synthetic(&synth, &tr, &te, &base));
      Dataset train_ds(tr), test_ds(te);
      Classifier base_owned(base);
      const fs::path dir(out_dir);
      fs::create_directories(dir);
      check(rtdtopo_dataset_save_csv(tr, (dir / "train.csv").c_str()));
      check(rtdtopo_dataset_save_csv(te, (dir / "test.csv").c_str()));
      check(rtdtopo_classifier_save_csv(base, (dir / "base.csv").c_str()));
      rtdtopo_train_config config;
      rtdtopo_train_config_default(&config);
      config.shots = synth.train_shots;
      config.seed = synth.seed;
      check(rtdtopo_manifest_save((dir / "run.json").c_str(), "train.csv", "test.csv", "base.csv",
                                  "out", &config));
      std::cerr << "wrote " << (dir / "run.json").string() << '\n';
    } else if (search->parsed()) {
      auto in = load_inputs(manifest_path, true, false);
      if (seed_override) in.config.seed = *seed_override;
      rtdtopo_lambda_result r;
      check(rtdtopo_lambda_search(in.train.get(), in.base.get(), &in.config, &r));
      json j;
      j["lambda"] = r.lambda;
      j["ratio"] = r.ratio;
      j["initial_ce"] = r.initial_ce;
      j["initial_rtd"] = r.initial_rtd;
      j["rtd_vanished"] = r.rtd_vanished != 0;
      j["iterations"] = r.iterations;
      if (r.rtd_vanished) std::cerr << "warning: initial RTD is zero; lambda set to 0\n";
      std::cout << j.dump(2) << '\n';
    } else if (train->parsed()) {
      auto in = load_inputs(manifest_path, true, true);
      if (seed_override) in.config.seed = *seed_override;
      rtdtopo_model* m = nullptr;
      rtdtopo_history* hist = nullptr;
      double lambda = 0.0;
      check(rtdtopo_train(in.train.get(), in.base.get(), &in.config, &m, &hist, &lambda));
      Model model(m);
      History history(hist);
      double zero_shot = 0.0, accuracy = 0.0;
      check(rtdtopo_evaluate(zero_shot_model(in).get(), in.test.get(), &zero_shot));
      check(rtdtopo_evaluate(m, in.test.get(), &accuracy));

      fs::create_directories(in.output_dir);
      check(rtdtopo_history_save_csv(hist, (in.output_dir / "metrics.csv").c_str()));
      check(rtdtopo_model_save_residual_csv(m, (in.output_dir / "residual.csv").c_str()));
      json report;
      report["test_accuracy"] = accuracy;
      report["zero_shot_accuracy"] = zero_shot;
      report["lambda"] = lambda;
      report["seed"] = in.config.seed;
      report["epochs"] = in.config.epochs;
      const size_t n_epochs = rtdtopo_history_count(hist);
      rtdtopo_epoch_metrics first, last;
      check(rtdtopo_history_get(hist, 0, &first));
      check(rtdtopo_history_get(hist, n_epochs - 1, &last));
      report["initial_l_rtd"] = first.rtd;
      report["final_l_rtd"] = last.rtd;
      const std::string text = report.dump(2) + "\n";
      {
        std::ofstream out(in.output_dir / "report.json");
        out << text;
        if (!out) throw Failure{RTDTOPO_ERR_IO, "cannot write report.json"};
      }
      std::cout << text;
    } else if (eval->parsed()) {
      auto in = load_inputs(manifest_path, false, true);
      auto model = zero_shot_model(in);
      if (!model_path.empty()) check(rtdtopo_model_load_residual_csv(model.get(), model_path.c_str()));
      double accuracy = 0.0;
      check(rtdtopo_evaluate(model.get(), in.test.get(), &accuracy));
      std::cout << num(accuracy) << '\n';
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return exit_code(f.status);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
