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
#include "rtdtopo/rtd.hpp"

namespace rtdtopo {

struct RtdGradient {
  Matrix grad_p;   // d RTD / d P, same shape as P
  Matrix grad_pt;  // d RTD / d Pt, same shape as Pt
};

struct RtdGradientResult {
  RtdGradient gradient;
  RtdReport report;
};

/// Subgradient of rtd_score with respect to both clouds' coordinates.
///
/// Each H1 interval adds +1 at its death simplex and -1 at its birth simplex.
/// A simplex's value is routed to its longest edge (lexicographically first on
/// ties), each edge to w or w~ through the cross-matrix provenance, and each
/// distance to the two endpoint coordinates. Coincident points get zero.
RtdGradientResult rtd_subgradient(const PointCloud& p, const PointCloud& pt);

/// d score / d m_e per edge of one directed barcode, keyed by 2N-vertex edge.
struct EdgeSensitivity {
  Simplex edge;
  double weight = 0.0;  // sum of +1/-1 contributions
  double value = 0.0;   // filtration value of the edge
};
std::vector<EdgeSensitivity> edge_sensitivities(const DirectedCrossBarcode& directed);

/// Smallest gap between distinct pairwise distances of the two clouds (zero
/// included as a value). Subgradients are exact derivatives when this is
/// comfortably larger than the perturbation size.
double filtration_tie_gap(const PointCloud& p, const PointCloud& pt);

struct DescentTrace {
  PointCloud result;
  std::vector<double> scores;  // score before each step, then the final one
};

/// Plain gradient descent on Pt with P held fixed.
DescentTrace descend_rtd(const PointCloud& p, const PointCloud& pt, int steps, double lr);

struct GradCheckResult {
  double max_rel_error = 0.0;
  double tie_gap = 0.0;
  int directions = 0;
};

/// Compares <grad, u> against central differences of rtd_score along
/// `trials` seeded random unit directions over both clouds jointly.
GradCheckResult finite_difference_check(const PointCloud& p, const PointCloud& pt,
                                        double h, int trials, std::uint64_t seed);

}  // namespace rtdtopo
