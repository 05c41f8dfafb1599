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
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "rtdtopo/core.hpp"

namespace rtdtopo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;
  Simplex birth_simplex;
  std::optional<Simplex> death_simplex;

  bool infinite() const noexcept { return !death_simplex.has_value(); }
  double length() const noexcept { return death - birth; }
};

/// Intervals with strictly positive length plus the infinite bars.
/// Zero-length pairs produced by the reduction are kept apart in
/// `zero_length`; they never count towards Betti numbers or scores.
struct Barcode {
  std::vector<PersistencePair> pairs;
  std::vector<PersistencePair> zero_length;
  int max_dim_computed = 0;

  std::vector<PersistencePair> in_dim(int dim) const;
  double total_finite_length(int dim) const;
};

// Pairing by filtration index, the raw output of the column reduction.
struct IndexPair {
  std::uint32_t birth;
  std::uint32_t death;  // kEssential when the class never dies
};
inline constexpr std::uint32_t kEssential = std::numeric_limits<std::uint32_t>::max();

struct ReductionOptions {
  // Reduce the top dimension first and skip columns already known to be
  // positive. Produces the same pairing as the plain left-to-right pass.
  bool clearing = true;
  // Highest homology dimension whose pairs are needed. Columns of
  // dimension > max_hom_dim + 1 are never reduced.
  int max_hom_dim = 1;
};

/// Z/2 boundary-matrix reduction. Returns every pair, zero-length included,
/// sorted by birth index. Throws DataError on a non-monotone complex.
std::vector<IndexPair> reduce_boundary(const FilteredComplex& fc,
                                       ReductionOptions options = {});

Barcode compute_persistence(const FilteredComplex& fc, ReductionOptions options = {});

/// Number of dim-dimensional bars alive at eps (birth <= eps < death).
std::size_t betti_at(const Barcode& bc, int dim, double eps);

/// H0 barcode via Kruskal merges with the elder rule.
Barcode zero_dim_persistence(const DistanceMatrix& dist);

/// CSV with header `dim,birth,death`; infinite deaths are written as `inf`.
void write_barcode_csv(std::ostream& out, const Barcode& bc);

}  // namespace rtdtopo
