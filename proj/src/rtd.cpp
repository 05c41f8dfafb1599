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

#include "rtdtopo/rtd.hpp"

#include <algorithm>
#include <future>
#include <string>

#include "rtdtopo/errors.hpp"
#include "rtdtopo/parallel.hpp"

namespace rtdtopo {

CrossMatrix build_rtd_matrix(const DistanceMatrix& w, const DistanceMatrix& wt) {
  if (w.size() != wt.size()) {
    throw InvalidArgument("RTD needs corresponding clouds: sizes " +
                          std::to_string(w.size()) + " and " + std::to_string(wt.size()));
  }
  const std::size_t n = w.size();
  if (n < 2) throw InvalidArgument("RTD needs at least two points");

  using Source = Provenance::Source;
  CrossMatrix cm;
  cm.n = n;
  cm.m = Matrix(2 * n, 2 * n);
  cm.provenance.resize(4 * n * n);
  auto set = [&](std::size_t r, std::size_t c, double v, Source s, std::size_t i,
                 std::size_t j) {
    cm.m(r, c) = v;
    cm.provenance[r * 2 * n + c] = {s, static_cast<std::uint32_t>(i),
                                    static_cast<std::uint32_t>(j)};
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      set(i, j, 0.0, Source::kZeroBlock, i, j);
      // w_+ keeps the upper triangle of w, diagonal included.
      if (i <= j) {
        set(n + i, j, w(i, j), Source::kWPlus, i, j);
        set(j, n + i, w(i, j), Source::kWPlus, i, j);
      } else {
        set(n + i, j, kBlocked, Source::kBlocked, i, j);
        set(j, n + i, kBlocked, Source::kBlocked, i, j);
      }
      if (w(i, j) <= wt(i, j)) {
        set(n + i, n + j, w(i, j), Source::kMinW, i, j);
      } else {
        set(n + i, n + j, wt(i, j), Source::kMinWTilde, i, j);
      }
    }
  }
  return cm;
}

DistanceMatrix CrossMatrix::edge_weights() const {
  const std::size_t size = 2 * n;
  Matrix e(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = r + 1; c < size; ++c) {
      e(r, c) = e(c, r) = std::min(m(r, c), m(c, r));
    }
  }
  return DistanceMatrix(std::move(e));
}

DirectedCrossBarcode r_cross_barcode(const PointCloud& p, const PointCloud& pt) {
  if (p.size() != pt.size()) {
    throw InvalidArgument("R-Cross-Barcode needs clouds of equal size, got " +
                          std::to_string(p.size()) + " and " + std::to_string(pt.size()));
  }
  if (p.size() < 2) throw InvalidArgument("R-Cross-Barcode needs at least two points");

  DirectedCrossBarcode out;
  out.matrix = build_rtd_matrix(pairwise_distances(p), pairwise_distances(pt));
  const auto fc = build_vr_filtration(out.matrix.edge_weights(), 2);
  Barcode full = compute_persistence(fc);

  out.barcode.max_dim_computed = full.max_dim_computed;
  for (const auto& pair : full.pairs) {
    if (pair.dim != 1) continue;
    if (pair.infinite()) {
      throw NumericError("R-Cross-Barcode has an infinite H1 bar born at " +
                         std::to_string(pair.birth));
    }
    out.barcode.pairs.push_back(pair);
    out.length_sum += pair.length();
  }
  for (const auto& pair : full.zero_length) {
    if (pair.dim == 1) out.barcode.zero_length.push_back(pair);
  }
  return out;
}

RtdReport rtd_score(const PointCloud& p, const PointCloud& pt) {
  RtdReport report;
  if (thread_budget() >= 2) {
    auto backward = std::async(std::launch::async, [&] { return r_cross_barcode(pt, p); });
    report.forward = r_cross_barcode(p, pt);
    report.backward = backward.get();
  } else {
    report.forward = r_cross_barcode(p, pt);
    report.backward = r_cross_barcode(pt, p);
  }
  report.score = 0.5 * (report.forward.length_sum + report.backward.length_sum);
  return report;
}

Barcode cross_barcode(const PointCloud& p, const PointCloud& q) {
  if (p.dim() != q.dim()) {
    throw InvalidArgument("cross-barcode needs a shared ambient dimension, got " +
                          std::to_string(p.dim()) + " and " + std::to_string(q.dim()));
  }
  const std::size_t np = p.size();
  const std::size_t total = np + q.size();
  Matrix joined(total, p.dim());
  for (std::size_t i = 0; i < total; ++i) {
    auto src = i < np ? p.point(i) : q.point(i - np);
    std::copy(src.begin(), src.end(), joined.row(i).begin());
  }
  Matrix d = pairwise_distances(PointCloud(std::move(joined))).entries();
  for (std::size_t i = np; i < total; ++i) {
    for (std::size_t j = np; j < total; ++j) d(i, j) = 0.0;
  }
  Barcode full = compute_persistence(build_vr_filtration(DistanceMatrix(std::move(d)), 2));
  Barcode out;
  out.max_dim_computed = full.max_dim_computed;
  out.pairs = full.in_dim(1);
  return out;
}

double mtop_div(const PointCloud& p, const PointCloud& q) {
  return cross_barcode(p, q).total_finite_length(1);
}

}  // namespace rtdtopo
