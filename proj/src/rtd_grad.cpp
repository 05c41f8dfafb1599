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

#include "rtdtopo/rtd_grad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "rtdtopo/errors.hpp"

namespace rtdtopo {
namespace {

// Adds coeff * d|p_i - p_j| / d(p_i, p_j) to the rows of grad.
void add_distance_gradient(const PointCloud& cloud, Matrix& grad, std::uint32_t i,
                           std::uint32_t j, double coeff) {
  if (i == j) return;
  auto pi = cloud.point(i);
  auto pj = cloud.point(j);
  double d2 = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) d2 += (pi[k] - pj[k]) * (pi[k] - pj[k]);
  const double d = std::sqrt(d2);
  if (d == 0.0) return;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    const double g = coeff * (pi[k] - pj[k]) / d;
    grad(i, k) += g;
    grad(j, k) -= g;
  }
}

// Routes one directed barcode's edge sensitivities to the two clouds that
// produced it: `first` supplied w, `second` supplied w~.
void route(const DirectedCrossBarcode& directed, const PointCloud& first,
           const PointCloud& second, Matrix& grad_first, Matrix& grad_second,
           double scale) {
  using Source = Provenance::Source;
  for (const auto& s : edge_sensitivities(directed)) {
    const auto& prov = directed.matrix.source(s.edge.vertices[0], s.edge.vertices[1]);
    const double coeff = scale * s.weight;
    switch (prov.source) {
      case Source::kWPlus:
      case Source::kMinW:
        add_distance_gradient(first, grad_first, prov.i, prov.j, coeff);
        break;
      case Source::kMinWTilde:
        add_distance_gradient(second, grad_second, prov.i, prov.j, coeff);
        break;
      case Source::kZeroBlock:
        break;
      case Source::kBlocked:
        throw NumericError("critical edge has a blocked cross-matrix entry");
    }
  }
}

}  // namespace

std::vector<EdgeSensitivity> edge_sensitivities(const DirectedCrossBarcode& directed) {
  const Matrix& m = directed.matrix.m;
  auto edge_value = [&](std::uint32_t a, std::uint32_t b) {
    return std::min(m(a, b), m(b, a));
  };
  std::map<Simplex, EdgeSensitivity> acc;
  auto bump = [&](const Simplex& e, double w) {
    auto [it, inserted] = acc.try_emplace(e);
    if (inserted) {
      it->second.edge = e;
      it->second.value = edge_value(e.vertices[0], e.vertices[1]);
    }
    it->second.weight += w;
  };

  for (const auto& pair : directed.barcode.pairs) {
    if (pair.infinite() || pair.birth_simplex.dim() != 1 || pair.death_simplex->dim() != 2) {
      throw NumericError("unexpected critical simplex in an H1 R-Cross-Barcode");
    }
    bump(pair.birth_simplex, -1.0);
    // A triangle's value is its longest edge; the faces are enumerated in
    // lexicographic order so the first maximum wins ties.
    const auto& v = pair.death_simplex->vertices;
    const Simplex faces[3] = {Simplex::edge(v[0], v[1]), Simplex::edge(v[0], v[2]),
                              Simplex::edge(v[1], v[2])};
    const Simplex* best = &faces[0];
    double best_value = edge_value(v[0], v[1]);
    for (int f = 1; f < 3; ++f) {
      const double val = edge_value(faces[f].vertices[0], faces[f].vertices[1]);
      if (val > best_value) {
        best_value = val;
        best = &faces[f];
      }
    }
    bump(*best, +1.0);
  }

  std::vector<EdgeSensitivity> out;
  out.reserve(acc.size());
  for (auto& [edge, s] : acc) {
    if (s.weight != 0.0) out.push_back(s);
  }
  return out;
}

RtdGradientResult rtd_subgradient(const PointCloud& p, const PointCloud& pt) {
  RtdGradientResult result{{Matrix(p.size(), p.dim()), Matrix(pt.size(), pt.dim())},
                           rtd_score(p, pt)};
  auto& g = result.gradient;
  route(result.report.forward, p, pt, g.grad_p, g.grad_pt, 0.5);
  route(result.report.backward, pt, p, g.grad_pt, g.grad_p, 0.5);
  return result;
}

double filtration_tie_gap(const PointCloud& p, const PointCloud& pt) {
  std::vector<double> values{0.0};
  for (const PointCloud* cloud : {&p, &pt}) {
    const auto d = pairwise_distances(*cloud);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) values.push_back(d(i, j));
    }
  }
  std::sort(values.begin(), values.end());
  double gap = kBlocked;
  for (std::size_t k = 1; k < values.size(); ++k) gap = std::min(gap, values[k] - values[k - 1]);
  return gap;
}

DescentTrace descend_rtd(const PointCloud& p, const PointCloud& pt, int steps, double lr) {
  if (steps < 0) throw InvalidArgument("descent steps must be non-negative");
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw InvalidArgument("descent learning rate must be finite and non-negative");
  }
  Matrix current = pt.points();
  DescentTrace trace{pt, {}};
  for (int step = 0; step < steps; ++step) {
    const PointCloud cloud(current);
    const auto r = rtd_subgradient(p, cloud);
    trace.scores.push_back(r.report.score);
    auto values = current.values();
    auto grad = r.gradient.grad_pt.values();
    for (std::size_t k = 0; k < values.size(); ++k) values[k] -= lr * grad[k];
  }
  trace.result = PointCloud(std::move(current));
  trace.scores.push_back(rtd_score(p, trace.result).score);
  return trace;
}

GradCheckResult finite_difference_check(const PointCloud& p, const PointCloud& pt,
                                        double h, int trials, std::uint64_t seed) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (trials < 1) throw InvalidArgument("grad check needs at least one direction");
  const auto analytic = rtd_subgradient(p, pt).gradient;
  GradCheckResult result;
  result.tie_gap = filtration_tie_gap(p, pt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t np = p.points().values().size();
  const std::size_t total = np + pt.points().values().size();
  for (int t = 0; t < trials; ++t) {
    std::vector<double> u(total);
    double len = 0.0;
    for (auto& x : u) {
      x = normal(rng);
      len += x * x;
    }
    len = std::sqrt(len);
    for (auto& x : u) x /= len;

    auto shifted = [&](double sign) {
      Matrix a = p.points();
      Matrix b = pt.points();
      auto av = a.values();
      auto bv = b.values();
      for (std::size_t k = 0; k < np; ++k) av[k] += sign * h * u[k];
      for (std::size_t k = np; k < total; ++k) bv[k - np] += sign * h * u[k];
      return rtd_score(PointCloud(std::move(a)), PointCloud(std::move(b))).score;
    };
    const double fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
    double an = 0.0;
    auto gp = analytic.grad_p.values();
    auto gq = analytic.grad_pt.values();
    for (std::size_t k = 0; k < np; ++k) an += gp[k] * u[k];
    for (std::size_t k = np; k < total; ++k) an += gq[k - np] * u[k];

    const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(fd - an) / denom);
    ++result.directions;
  }
  return result;
}

}  // namespace rtdtopo
