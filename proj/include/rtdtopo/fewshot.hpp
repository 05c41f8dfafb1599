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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rtdtopo/matrix.hpp"

namespace rtdtopo {

// Labelled visual embeddings, one row per sample.
struct EmbeddingDataset {
  Matrix embeddings;
  std::vector<int> labels;
  int class_count = 0;

  EmbeddingDataset() = default;
  /// Validates sizes, finiteness and label range [0, class_count).
  EmbeddingDataset(Matrix embeddings, std::vector<int> labels, int class_count);

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return embeddings.cols(); }
  /// Row indices of each class, in file order.
  std::vector<std::vector<std::size_t>> rows_by_class() const;
};

/// First `shots` rows of every class in file order; shots <= 0 keeps all.
EmbeddingDataset take_shots(const EmbeddingDataset& ds, int shots);

// Frozen text classifier, row k = class k.
class BaseClassifier {
 public:
  BaseClassifier() = default;
  /// Rejects empty, non-finite or zero-norm rows.
  explicit BaseClassifier(Matrix text_weights);

  int class_count() const noexcept { return static_cast<int>(weights_.rows()); }
  std::size_t dim() const noexcept { return weights_.cols(); }
  const Matrix& text_weights() const noexcept { return weights_; }

 private:
  Matrix weights_;
};

struct TaskResidualModel {
  BaseClassifier base;
  Matrix residual;  // K x D, starts at zero
  double alpha = 0.5;
  double logit_scale = 100.0;

  TaskResidualModel() = default;
  TaskResidualModel(BaseClassifier base, double alpha, double logit_scale);

  /// Row k = normalize(base_k + alpha * residual_k).
  Matrix effective_classifier() const;
};

struct TrainConfig {
  int shots = 16;
  int epochs = 100;
  double lr = 1e-4;
  double lambda = 1.0;  // used as-is, or as the starting guess of the search
  double alpha = 0.5;
  double logit_scale = 100.0;
  std::uint64_t seed = 0;
  bool lambda_search = true;
  double band_lower = 0.33;
  double band_upper = 0.37;

  /// Throws InvalidArgument on lr <= 0, lambda < 0, band_lower >= band_upper,
  /// non-positive alpha or logit scale, negative epochs.
  void validate() const;
};

/// Draws batches of exactly K rows, one per class, in class order. Each epoch
/// reshuffles every class; a class that runs out within an epoch is
/// reshuffled and reused.
class ClassBalancedSampler {
 public:
  ClassBalancedSampler(const EmbeddingDataset& ds, std::uint64_t seed);

  std::size_t batches_per_epoch() const noexcept { return batches_per_epoch_; }
  /// Row indices into the dataset; element k has label k.
  std::vector<std::size_t> next_batch();

 private:
  void reshuffle(std::size_t cls);

  std::vector<std::vector<std::size_t>> rows_;
  std::vector<std::size_t> cursor_;
  std::size_t batches_per_epoch_ = 0;
  std::size_t emitted_in_epoch_ = 0;
  std::mt19937_64 rng_;
};

/// `epochs` epochs worth of batches from a fresh sampler.
std::vector<std::vector<std::size_t>> class_balanced_batches(const EmbeddingDataset& ds,
                                                             std::uint64_t seed,
                                                             int epochs = 1);

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows);

/// logits(i, k) = logit_scale * cos(visual_i, classifier_k).
Matrix forward_logits(const TaskResidualModel& model, const Matrix& visual);

struct LossTerms {
  double ce = 0.0;
  double rtd = 0.0;
  double total = 0.0;
  Matrix grad_residual;  // d total / d residual
};

/// CE(logits, 0..K-1) + lambda * RTD(normalized visual, effective classifier).
/// The batch must have one row per class in class order.
LossTerms combined_loss(const TaskResidualModel& model, const Matrix& batch, double lambda);

struct LambdaSearchResult {
  double lambda = 0.0;
  double ratio = 0.0;       // lambda * rtd / ce at the returned lambda
  double initial_ce = 0.0;  // epoch mean at residual = 0
  double initial_rtd = 0.0;
  bool rtd_vanished = false;  // initial RTD was zero; lambda forced to 0
  int iterations = 0;
};

/// Doubles then bisects lambda until lambda * rtd / ce lies in [lower, upper].
LambdaSearchResult search_lambda_for_ratio(double ce, double rtd, double lower,
                                           double upper, double initial_guess = 1.0);

/// Mean CE and RTD over the first epoch's batches of an untrained model.
LambdaSearchResult lambda_search(const EmbeddingDataset& ds, const BaseClassifier& base,
                                 const TrainConfig& config);

struct EpochMetrics {
  int epoch = 0;  // 0 is the untrained model measured on the first epoch's batches
  double ce = 0.0;
  double rtd = 0.0;
  double total = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  TaskResidualModel model;
  std::vector<EpochMetrics> history;
  double lambda = 0.0;
  bool lambda_flagged = false;
};

/// Cosine-annealed step size: lr at step 0, 0 at step total_steps - 1.
double cosine_lr(double base_lr, std::size_t step, std::size_t total_steps);

/// Adam on the residual only.
TrainResult train(const EmbeddingDataset& ds, const BaseClassifier& base,
                  const TrainConfig& config);

/// Top-1 accuracy; ties resolve to the lowest class index.
double evaluate(const TaskResidualModel& model, const EmbeddingDataset& ds);

struct SyntheticParams {
  int classes = 10;
  int train_shots = 16;
  int test_shots = 50;
  int dim = 32;
  double cluster_spread = 0.25;
  double modality_gap = 1.75;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  EmbeddingDataset train;
  EmbeddingDataset test;
  BaseClassifier base;
};

/// Class centers on the unit sphere; visual samples are noisy normalized
/// centers; text rows are centers under a small rotation plus noise, both
/// scaled by the modality gap.
SyntheticData gen_synthetic(const SyntheticParams& params);

}  // namespace rtdtopo
