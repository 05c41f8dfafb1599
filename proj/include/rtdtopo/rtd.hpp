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
#include <vector>

#include "rtdtopo/core.hpp"
#include "rtdtopo/persistence.hpp"

namespace rtdtopo {

// Where an entry of the 2N x 2N cross matrix comes from. `i`, `j` index the
// N x N source matrices.
struct Provenance {
  enum class Source : std::uint8_t {
    kZeroBlock,   // top-left block, constant 0
    kWPlus,       // w restricted to its upper triangle (diagonal included)
    kMinW,        // min(w, w~) where w attained the minimum (ties go to w)
    kMinWTilde,   // min(w, w~) where w~ was strictly smaller
    kBlocked,     // lower triangle of w_+, never enters the filtration
  };
  Source source = Source::kZeroBlock;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
};

/// m = [[0, w_+^T], [w_+, min(w, w~)]]. Vertices 0..N-1 are the first copy,
/// N..2N-1 the second copy.
struct CrossMatrix {
  std::size_t n = 0;
  Matrix m;
  std::vector<Provenance> provenance;  // row-major, 2N x 2N

  const Provenance& source(std::size_t r, std::size_t c) const {
    return provenance[r * 2 * n + c];
  }
  /// One value per undirected edge: the smaller of the two oriented entries.
  DistanceMatrix edge_weights() const;
};

CrossMatrix build_rtd_matrix(const DistanceMatrix& w, const DistanceMatrix& wt);

struct DirectedCrossBarcode {
  CrossMatrix matrix;
  Barcode barcode;  // dimension 1 only
  double length_sum = 0.0;
};

/// H1 R-Cross-Barcode of the weighted 2N-vertex graph built from (P, Pt).
DirectedCrossBarcode r_cross_barcode(const PointCloud& p, const PointCloud& pt);

struct RtdReport {
  double score = 0.0;
  DirectedCrossBarcode forward;   // R-Cross-Barcode(P, Pt)
  DirectedCrossBarcode backward;  // R-Cross-Barcode(Pt, P)
};

/// Symmetrized divergence: half the sum of both directed H1 length sums.
RtdReport rtd_score(const PointCloud& p, const PointCloud& pt);

/// H1 barcode of the VR filtration on P u Q with distances inside Q zeroed.
Barcode cross_barcode(const PointCloud& p, const PointCloud& q);

/// Total H1 bar length of cross_barcode(P, Q).
double mtop_div(const PointCloud& p, const PointCloud& q);

}  // namespace rtdtopo
