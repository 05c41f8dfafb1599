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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rtdtopo/matrix.hpp"

namespace rtdtopo {

// Sentinel for edges that must never enter a filtration. Compares greater than
// every finite distance.
inline constexpr double kBlocked = std::numeric_limits<double>::infinity();

/// N points in R^D. Row i is the identity of point i; two clouds correspond
/// when they have the same size and row i names the same sample in both.
class PointCloud {
 public:
  /// Throws InvalidArgument on an empty matrix or non-finite coordinates.
  explicit PointCloud(Matrix points);

  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  std::span<const double> point(std::size_t i) const { return points_.row(i); }
  const Matrix& points() const noexcept { return points_; }

 private:
  Matrix points_;
};

/// Symmetric, zero-diagonal, non-negative matrix. Entries may be kBlocked.
class DistanceMatrix {
 public:
  /// Validates symmetry, the zero diagonal and the value domain.
  explicit DistanceMatrix(Matrix entries);

  std::size_t size() const noexcept { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Matrix& entries() const noexcept { return entries_; }

 private:
  Matrix entries_;
};

/// Up to three sorted vertex indices (dimension 0, 1 or 2).
struct Simplex {
  std::array<std::uint32_t, 3> vertices{};
  std::uint8_t count = 0;

  static Simplex vertex(std::uint32_t a);
  static Simplex edge(std::uint32_t a, std::uint32_t b);
  static Simplex triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c);

  int dim() const noexcept { return static_cast<int>(count) - 1; }
  std::span<const std::uint32_t> verts() const noexcept {
    return {vertices.data(), count};
  }

  bool operator==(const Simplex& o) const noexcept;
  std::strong_ordering operator<=>(const Simplex& o) const noexcept;
};

struct FilteredSimplex {
  Simplex simplex;
  double value = 0.0;
};

/// Simplices stored in filtration order: ascending (value, dim, vertices).
class FilteredComplex {
 public:
  FilteredComplex() = default;

  /// Sorts into filtration order. Faces are not checked here; persistence
  /// computation rejects complexes that are not monotone.
  FilteredComplex(std::size_t vertex_count, std::vector<FilteredSimplex> simplices);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t size() const noexcept { return simplices_.size(); }
  int max_dim() const noexcept { return max_dim_; }
  const FilteredSimplex& operator[](std::size_t i) const { return simplices_[i]; }
  std::span<const FilteredSimplex> simplices() const noexcept { return simplices_; }

  /// Throws DataError naming the first simplex with a missing or later face.
  void check_monotone() const;

  /// Sorted distinct filtration values.
  std::vector<double> critical_values() const;

 private:
  std::size_t vertex_count_ = 0;
  int max_dim_ = -1;
  std::vector<FilteredSimplex> simplices_;
};

bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b) noexcept;

DistanceMatrix pairwise_distances(const PointCloud& cloud);

/// Vietoris-Rips filtration up to max_dim (1 or 2). Blocked edges and all of
/// their cofaces are left out.
FilteredComplex build_vr_filtration(const DistanceMatrix& dist, int max_dim);

/// Simplices with value <= eps, in filtration order.
std::vector<Simplex> complex_at_threshold(const FilteredComplex& fc, double eps);

}  // namespace rtdtopo
