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

#include "rtdtopo/fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "rtdtopo/errors.hpp"
#include "rtdtopo/parallel.hpp"
#include "rtdtopo/rtd_grad.hpp"

namespace rtdtopo {
namespace {

void check_finite(const Matrix& m, const char* what) {
  for (double v : m.values()) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " has a non-finite value");
  }
}

Matrix normalized_rows(const Matrix& m, const char* what) {
  Matrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double len = norm(m.row(r));
    if (len == 0.0) {
      throw InvalidArgument(std::string(what) + " row " + std::to_string(r) + " has zero norm");
    }
    for (double& v : out.row(r)) v /= len;
  }
  return out;
}

// Logits for normalized rows against a normalized classifier.
Matrix cosine_logits(const Matrix& visual_unit, const Matrix& classifier, double scale) {
  Matrix logits(visual_unit.rows(), classifier.rows());
  for (std::size_t i = 0; i < visual_unit.rows(); ++i) {
    for (std::size_t k = 0; k < classifier.rows(); ++k) {
      logits(i, k) = scale * dot(visual_unit.row(i), classifier.row(k));
    }
  }
  return logits;
}

std::size_t argmax_lowest(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return best;
}

struct EpochMeans {
  double ce = 0.0;
  double rtd = 0.0;
};

EpochMeans initial_means(const EmbeddingDataset& ds, const TaskResidualModel& model,
                         std::uint64_t seed) {
  ClassBalancedSampler sampler(ds, seed);
  EpochMeans means;
  const std::size_t batches = sampler.batches_per_epoch();
  for (std::size_t b = 0; b < batches; ++b) {
    const auto terms = combined_loss(model, gather_rows(ds.embeddings, sampler.next_batch()), 0.0);
    means.ce += terms.ce;
    means.rtd += terms.rtd;
  }
  means.ce /= static_cast<double>(batches);
  means.rtd /= static_cast<double>(batches);
  return means;
}

void check_compatible(const EmbeddingDataset& ds, const BaseClassifier& base) {
  if (ds.class_count != base.class_count()) {
    throw DataError("dataset has " + std::to_string(ds.class_count) +
                    " classes but the classifier has " + std::to_string(base.class_count()));
  }
  if (ds.dim() != base.dim()) {
    throw DataError("embedding dimension " + std::to_string(ds.dim()) +
                    " does not match classifier dimension " + std::to_string(base.dim()));
  }
}

}  // namespace

EmbeddingDataset::EmbeddingDataset(Matrix emb, std::vector<int> lab, int k)
    : embeddings(std::move(emb)), labels(std::move(lab)), class_count(k) {
  if (class_count < 1) throw InvalidArgument("dataset needs at least one class");
  if (labels.empty()) throw InvalidArgument("dataset is empty");
  if (embeddings.rows() != labels.size()) {
    throw InvalidArgument("dataset has " + std::to_string(embeddings.rows()) + " rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  check_finite(embeddings, "dataset");
  for (int l : labels) {
    if (l < 0 || l >= class_count) {
      throw InvalidArgument("label " + std::to_string(l) + " outside [0, " +
                            std::to_string(class_count) + ")");
    }
  }
}

std::vector<std::vector<std::size_t>> EmbeddingDataset::rows_by_class() const {
  std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(class_count));
  for (std::size_t r = 0; r < labels.size(); ++r) rows[labels[r]].push_back(r);
  return rows;
}

EmbeddingDataset take_shots(const EmbeddingDataset& ds, int shots) {
  if (shots <= 0) return ds;
  std::vector<std::size_t> keep;
  std::vector<int> seen(static_cast<std::size_t>(ds.class_count), 0);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (seen[ds.labels[r]]++ < shots) keep.push_back(r);
  }
  std::vector<int> labels;
  for (auto r : keep) labels.push_back(ds.labels[r]);
  return EmbeddingDataset(gather_rows(ds.embeddings, keep), std::move(labels), ds.class_count);
}

BaseClassifier::BaseClassifier(Matrix text_weights) : weights_(std::move(text_weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw InvalidArgument("classifier needs at least one class and one dimension");
  }
  check_finite(weights_, "classifier");
  normalized_rows(weights_, "classifier");
}

TaskResidualModel::TaskResidualModel(BaseClassifier b, double a, double scale)
    : base(std::move(b)), residual(base.text_weights().rows(), base.dim()), alpha(a),
      logit_scale(scale) {
  if (!(alpha > 0.0) || !(logit_scale > 0.0)) {
    throw InvalidArgument("alpha and logit_scale must be positive");
  }
}

Matrix TaskResidualModel::effective_classifier() const {
  const Matrix& w = base.text_weights();
  Matrix u(w.rows(), w.cols());
  for (std::size_t k = 0; k < w.rows(); ++k) {
    for (std::size_t d = 0; d < w.cols(); ++d) u(k, d) = w(k, d) + alpha * residual(k, d);
  }
  try {
    return normalized_rows(u, "adapted classifier");
  } catch (const InvalidArgument& e) {
    throw NumericError(e.what());
  }
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw InvalidArgument("lr must be positive");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (!(band_lower < band_upper) || !(band_lower > 0.0)) {
    throw InvalidArgument("target ratio band must satisfy 0 < lower < upper");
  }
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(logit_scale > 0.0)) throw InvalidArgument("logit_scale must be positive");
  if (epochs < 0) throw InvalidArgument("epochs must be non-negative");
}

ClassBalancedSampler::ClassBalancedSampler(const EmbeddingDataset& ds, std::uint64_t seed)
    : rows_(ds.rows_by_class()), cursor_(rows_.size(), 0), rng_(seed) {
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    if (rows_[k].empty()) {
      throw DataError("class " + std::to_string(k) + " has no samples");
    }
    batches_per_epoch_ = std::max(batches_per_epoch_, rows_[k].size());
  }
  for (std::size_t k = 0; k < rows_.size(); ++k) reshuffle(k);
}

void ClassBalancedSampler::reshuffle(std::size_t cls) {
  std::shuffle(rows_[cls].begin(), rows_[cls].end(), rng_);
  cursor_[cls] = 0;
}

std::vector<std::size_t> ClassBalancedSampler::next_batch() {
  if (emitted_in_epoch_ == batches_per_epoch_) {
    for (std::size_t k = 0; k < rows_.size(); ++k) reshuffle(k);
    emitted_in_epoch_ = 0;
  }
  std::vector<std::size_t> batch(rows_.size());
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    if (cursor_[k] == rows_[k].size()) reshuffle(k);
    batch[k] = rows_[k][cursor_[k]++];
  }
  ++emitted_in_epoch_;
  return batch;
}

std::vector<std::vector<std::size_t>> class_balanced_batches(const EmbeddingDataset& ds,
                                                             std::uint64_t seed, int epochs) {
  ClassBalancedSampler sampler(ds, seed);
  std::vector<std::vector<std::size_t>> out;
  const std::size_t total = sampler.batches_per_epoch() * static_cast<std::size_t>(std::max(0, epochs));
  for (std::size_t b = 0; b < total; ++b) out.push_back(sampler.next_batch());
  return out;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = m.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Matrix forward_logits(const TaskResidualModel& model, const Matrix& visual) {
  if (visual.cols() != model.base.dim()) {
    throw InvalidArgument("visual dimension " + std::to_string(visual.cols()) +
                          " does not match classifier dimension " +
                          std::to_string(model.base.dim()));
  }
  check_finite(visual, "visual batch");
  return cosine_logits(normalized_rows(visual, "visual batch"), model.effective_classifier(),
                       model.logit_scale);
}

LossTerms combined_loss(const TaskResidualModel& model, const Matrix& batch, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  const std::size_t k_count = model.base.text_weights().rows();
  const std::size_t dim = model.base.dim();
  if (batch.rows() != k_count) {
    throw InvalidArgument("batch must hold one row per class (" + std::to_string(k_count) +
                          "), got " + std::to_string(batch.rows()));
  }
  if (batch.cols() != dim) throw InvalidArgument("batch dimension mismatch");
  check_finite(batch, "visual batch");

  const Matrix visual = normalized_rows(batch, "visual batch");
  const Matrix classifier = model.effective_classifier();
  const Matrix logits = cosine_logits(visual, classifier, model.logit_scale);

  LossTerms terms;
  // d CE / d classifier, accumulated row by row.
  Matrix grad_c(k_count, dim);
  const double inv_k = 1.0 / static_cast<double>(k_count);
  for (std::size_t i = 0; i < k_count; ++i) {
    auto z = logits.row(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    terms.ce += (zmax + std::log(sum) - z[i]) * inv_k;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double g = (std::exp(z[k] - zmax) / sum - (k == i ? 1.0 : 0.0)) * inv_k;
      const double coeff = g * model.logit_scale;
      for (std::size_t d = 0; d < dim; ++d) grad_c(k, d) += coeff * visual(i, d);
    }
  }

  if (k_count >= 2) {
    const auto rtd = rtd_subgradient(PointCloud(visual), PointCloud(classifier));
    terms.rtd = rtd.report.score;
    if (lambda != 0.0) {
      // The visual encoder is frozen: only the classifier side receives gradient.
      const Matrix& g = rtd.gradient.grad_pt;
      for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t d = 0; d < dim; ++d) grad_c(k, d) += lambda * g(k, d);
      }
    }
  }
  terms.total = terms.ce + lambda * terms.rtd;

  // Chain through c = u / |u| with u = base + alpha * residual.
  const Matrix& w = model.base.text_weights();
  terms.grad_residual = Matrix(k_count, dim);
  for (std::size_t k = 0; k < k_count; ++k) {
    double u2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double u = w(k, d) + model.alpha * model.residual(k, d);
      u2 += u * u;
    }
    const double len = std::sqrt(u2);
    const double proj = dot(classifier.row(k), grad_c.row(k));
    for (std::size_t d = 0; d < dim; ++d) {
      terms.grad_residual(k, d) =
          model.alpha * (grad_c(k, d) - classifier(k, d) * proj) / len;
    }
  }
  return terms;
}

LambdaSearchResult search_lambda_for_ratio(double ce, double rtd, double lower, double upper,
                                           double initial_guess) {
  if (!(lower > 0.0 && lower < upper)) throw InvalidArgument("invalid target ratio band");
  LambdaSearchResult r;
  r.initial_ce = ce;
  r.initial_rtd = rtd;
  if (rtd == 0.0) {
    r.rtd_vanished = true;
    return r;
  }
  if (!(ce > 0.0)) throw DataError("initial cross-entropy is zero; lambda is undefined");
  auto ratio = [&](double lambda) { return lambda * rtd / ce; };
  auto in_band = [&](double q) { return q >= lower && q <= upper; };
  auto done = [&](double lambda) {
    r.lambda = lambda;
    r.ratio = ratio(lambda);
    return r;
  };

  double lambda = initial_guess > 0.0 ? initial_guess : 1.0;
  double lo = 0.0;
  double hi = lambda;
  if (in_band(ratio(lambda))) return done(lambda);
  if (ratio(lambda) < lower) {
    while (ratio(hi) < lower) {
      lo = hi;
      hi *= 2.0;
      ++r.iterations;
      if (!std::isfinite(hi)) throw NumericError("lambda search diverged while doubling");
    }
    if (in_band(ratio(hi))) return done(hi);
  }
  for (int it = 0; it < 200; ++it) {
    ++r.iterations;
    const double mid = 0.5 * (lo + hi);
    const double q = ratio(mid);
    if (in_band(q)) return done(mid);
    (q < lower ? lo : hi) = mid;
  }
  throw NumericError("lambda search did not reach the target band");
}

LambdaSearchResult lambda_search(const EmbeddingDataset& ds_in, const BaseClassifier& base,
                                 const TrainConfig& config) {
  config.validate();
  const EmbeddingDataset ds = take_shots(ds_in, config.shots);
  check_compatible(ds, base);
  const TaskResidualModel model(base, config.alpha, config.logit_scale);
  const auto means = initial_means(ds, model, config.seed);
  return search_lambda_for_ratio(means.ce, means.rtd, config.band_lower, config.band_upper,
                                 config.lambda);
}

double cosine_lr(double base_lr, std::size_t step, std::size_t total_steps) {
  if (total_steps <= 1) return base_lr;
  const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
  return 0.5 * base_lr * (1.0 + std::cos(std::numbers::pi * std::min(t, 1.0)));
}

TrainResult train(const EmbeddingDataset& ds_in, const BaseClassifier& base,
                  const TrainConfig& config) {
  config.validate();
  const EmbeddingDataset ds = take_shots(ds_in, config.shots);
  check_compatible(ds, base);

  TrainResult result;
  result.model = TaskResidualModel(base, config.alpha, config.logit_scale);
  result.lambda = config.lambda;
  if (config.lambda_search) {
    const auto search = lambda_search(ds, base, config);
    result.lambda = search.lambda;
    result.lambda_flagged = search.rtd_vanished;
  }
  const double lambda = result.lambda;
  auto& model = result.model;

  const auto start = initial_means(ds, model, config.seed);
  result.history.push_back(
      {0, start.ce, start.rtd, start.ce + lambda * start.rtd, evaluate(model, ds)});

  ClassBalancedSampler sampler(ds, config.seed);
  const std::size_t per_epoch = sampler.batches_per_epoch();
  const std::size_t total_steps = per_epoch * static_cast<std::size_t>(config.epochs);
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::vector<double> m1(model.residual.values().size(), 0.0);
  std::vector<double> m2(m1.size(), 0.0);
  std::size_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMetrics metrics;
    metrics.epoch = epoch;
    for (std::size_t b = 0; b < per_epoch; ++b) {
      const auto terms =
          combined_loss(model, gather_rows(ds.embeddings, sampler.next_batch()), lambda);
      metrics.ce += terms.ce;
      metrics.rtd += terms.rtd;
      metrics.total += terms.total;

      const double lr = cosine_lr(config.lr, step, total_steps);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto params = model.residual.values();
      auto grad = terms.grad_residual.values();
      for (std::size_t i = 0; i < params.size(); ++i) {
        m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * grad[i];
        m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        params[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + kEps);
      }
    }
    const double inv = 1.0 / static_cast<double>(per_epoch);
    metrics.ce *= inv;
    metrics.rtd *= inv;
    metrics.total *= inv;
    metrics.train_accuracy = evaluate(model, ds);
    result.history.push_back(metrics);
  }
  return result;
}

double evaluate(const TaskResidualModel& model, const EmbeddingDataset& ds) {
  if (ds.size() == 0) return 0.0;
  check_compatible(ds, model.base);
  const Matrix classifier = model.effective_classifier();
  const Matrix visual = normalized_rows(ds.embeddings, "test embeddings");
  const std::size_t m = ds.size();
  const std::size_t workers = std::min<std::size_t>(thread_budget(), (m + 255) / 256);

  std::vector<unsigned char> correct(m, 0);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(classifier.rows());
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < classifier.rows(); ++k) {
        row[k] = model.logit_scale * dot(visual.row(i), classifier.row(k));
      }
      correct[i] = argmax_lowest(row) == static_cast<std::size_t>(ds.labels[i]);
    }
  };
  if (workers <= 1) {
    score_range(0, m);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (m + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      pool.emplace_back(score_range, begin, std::min(m, begin + chunk));
    }
    for (auto& t : pool) t.join();
  }
  const auto hits = std::count(correct.begin(), correct.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(m);
}

SyntheticData gen_synthetic(const SyntheticParams& p) {
  if (p.classes < 1 || p.train_shots < 1 || p.test_shots < 1 || p.dim < 1) {
    throw InvalidArgument("synthetic counts must all be at least 1");
  }
  if (!(p.cluster_spread >= 0.0) || !(p.modality_gap >= 0.0)) {
    throw InvalidArgument("spread and modality gap must be non-negative");
  }
  const auto k_count = static_cast<std::size_t>(p.classes);
  const auto dim = static_cast<std::size_t>(p.dim);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal;
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(dim));

  auto unit = [](std::vector<double> v) {
    const double len = norm(v);
    if (len > 0.0) for (double& x : v) x /= len;
    return v;
  };

  std::vector<std::vector<double>> centers(k_count);
  for (auto& c : centers) {
    std::vector<double> v(dim);
    for (double& x : v) x = normal(rng);
    c = unit(std::move(v));
  }

  // Random orthonormal basis; the rotation turns each consecutive basis pair
  // by an angle proportional to the modality gap.
  std::vector<std::vector<double>> basis;
  while (basis.size() < dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = normal(rng);
    for (const auto& b : basis) {
      const double proj = dot(v, b);
      for (std::size_t d = 0; d < dim; ++d) v[d] -= proj * b[d];
    }
    if (norm(v) > 1e-8) basis.push_back(unit(std::move(v)));
  }
  std::vector<double> angles(dim / 2);
  for (double& a : angles) {
    a = 0.25 * p.modality_gap * std::uniform_real_distribution<double>(0.5, 1.0)(rng);
  }
  auto rotate = [&](const std::vector<double>& x) {
    std::vector<double> out = x;
    for (std::size_t q = 0; q < angles.size(); ++q) {
      const auto& e1 = basis[2 * q];
      const auto& e2 = basis[2 * q + 1];
      const double a = dot(x, e1);
      const double b = dot(x, e2);
      const double c = std::cos(angles[q]);
      const double s = std::sin(angles[q]);
      for (std::size_t d = 0; d < dim; ++d) {
        out[d] += (c * a - s * b - a) * e1[d] + (s * a + c * b - b) * e2[d];
      }
    }
    return out;
  };

  Matrix text(k_count, dim);
  for (std::size_t k = 0; k < k_count; ++k) {
    auto t = rotate(centers[k]);
    for (double& x : t) x += p.modality_gap * noise_scale * normal(rng);
    t = unit(std::move(t));
    std::copy(t.begin(), t.end(), text.row(k).begin());
  }

  auto sample = [&](int shots) {
    Matrix emb(k_count * static_cast<std::size_t>(shots), dim);
    std::vector<int> labels;
    std::size_t r = 0;
    for (int s = 0; s < shots; ++s) {
      for (std::size_t k = 0; k < k_count; ++k, ++r) {
        std::vector<double> v = centers[k];
        for (double& x : v) x += p.cluster_spread * noise_scale * normal(rng);
        v = unit(std::move(v));
        std::copy(v.begin(), v.end(), emb.row(r).begin());
        labels.push_back(static_cast<int>(k));
      }
    }
    return EmbeddingDataset(std::move(emb), std::move(labels), p.classes);
  };

  SyntheticData data;
  data.train = sample(p.train_shots);
  data.test = sample(p.test_shots);
  data.base = BaseClassifier(std::move(text));
  return data;
}

}  // namespace rtdtopo
