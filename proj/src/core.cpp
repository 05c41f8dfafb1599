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

#include "rtdtopo/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "rtdtopo/errors.hpp"

namespace rtdtopo {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw InvalidArgument("point cloud needs at least one point and one coordinate");
  }
  for (double v : points_.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("point cloud has a non-finite coordinate");
  }
}

DistanceMatrix::DistanceMatrix(Matrix entries) : entries_(std::move(entries)) {
  const std::size_t n = entries_.rows();
  if (n == 0 || entries_.cols() != n) {
    throw InvalidArgument("distance matrix must be square and non-empty");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = entries_(i, j);
      if (a != entries_(j, i)) throw InvalidArgument("distance matrix is not symmetric");
      if (std::isnan(a) || a < 0.0 || (std::isinf(a) && a != kBlocked)) {
        throw InvalidArgument("distance matrix entry out of domain at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

Simplex Simplex::vertex(std::uint32_t a) { return Simplex{{a, 0, 0}, 1}; }

Simplex Simplex::edge(std::uint32_t a, std::uint32_t b) {
  if (a == b) throw InvalidArgument("edge needs two distinct vertices");
  if (a > b) std::swap(a, b);
  return Simplex{{a, b, 0}, 2};
}

Simplex Simplex::triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  std::array<std::uint32_t, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  if (v[0] == v[1] || v[1] == v[2]) {
    throw InvalidArgument("triangle needs three distinct vertices");
  }
  return Simplex{v, 3};
}

bool Simplex::operator==(const Simplex& o) const noexcept {
  return count == o.count && std::equal(vertices.begin(), vertices.begin() + count,
                                        o.vertices.begin());
}

std::strong_ordering Simplex::operator<=>(const Simplex& o) const noexcept {
  return std::lexicographical_compare_three_way(vertices.begin(), vertices.begin() + count,
                                                o.vertices.begin(),
                                                o.vertices.begin() + o.count);
}

bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b) noexcept {
  if (a.value != b.value) return a.value < b.value;
  if (a.simplex.count != b.simplex.count) return a.simplex.count < b.simplex.count;
  return a.simplex < b.simplex;
}

FilteredComplex::FilteredComplex(std::size_t vertex_count,
                                 std::vector<FilteredSimplex> simplices)
    : vertex_count_(vertex_count), simplices_(std::move(simplices)) {
  for (const auto& s : simplices_) {
    if (s.simplex.count == 0 || s.simplex.count > 3) {
      throw InvalidArgument("simplex dimension must be 0, 1 or 2");
    }
    for (auto v : s.simplex.verts()) {
      if (v >= vertex_count_) throw InvalidArgument("simplex vertex out of range");
    }
    if (std::isnan(s.value) || std::isinf(s.value)) {
      throw InvalidArgument("filtration values must be finite");
    }
    max_dim_ = std::max(max_dim_, s.simplex.dim());
  }
  std::sort(simplices_.begin(), simplices_.end(), filtration_less);
}

void FilteredComplex::check_monotone() const {
  const std::size_t n = vertex_count_;
  constexpr double kMissing = -1.0;
  std::vector<double> vertex_value(n, kMissing);
  std::vector<double> edge_value(n * n, kMissing);
  auto fail = [](const Simplex& s, const char* why) {
    std::string desc;
    for (auto v : s.verts()) desc += (desc.empty() ? "" : ",") + std::to_string(v);
    throw DataError("filtration is not monotone at simplex {" + desc + "}: " + why);
  };
  // Filtration order puts faces first whenever values are monotone, so a face
  // that is absent at this point is either missing or later.
  for (const auto& fs : simplices_) {
    const auto& v = fs.simplex.vertices;
    switch (fs.simplex.count) {
      case 1:
        if (vertex_value[v[0]] != kMissing) fail(fs.simplex, "duplicate simplex");
        vertex_value[v[0]] = fs.value;
        break;
      case 2: {
        if (vertex_value[v[0]] == kMissing || vertex_value[v[1]] == kMissing) {
          fail(fs.simplex, "vertex missing or entered later");
        }
        double& slot = edge_value[v[0] * n + v[1]];
        if (slot != kMissing) fail(fs.simplex, "duplicate simplex");
        slot = fs.value;
        break;
      }
      case 3:
        if (edge_value[v[0] * n + v[1]] == kMissing || edge_value[v[0] * n + v[2]] == kMissing ||
            edge_value[v[1] * n + v[2]] == kMissing) {
          fail(fs.simplex, "edge missing or entered later");
        }
        break;
    }
  }
}

std::vector<double> FilteredComplex::critical_values() const {
  std::vector<double> values;
  for (const auto& s : simplices_) {
    if (values.empty() || values.back() != s.value) values.push_back(s.value);
  }
  return values;
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto pi = cloud.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto pj = cloud.point(j);
      double s = 0.0;
      for (std::size_t k = 0; k < pi.size(); ++k) {
        const double diff = pi[k] - pj[k];
        s += diff * diff;
      }
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  }
  return DistanceMatrix(std::move(d));
}

FilteredComplex build_vr_filtration(const DistanceMatrix& dist, int max_dim) {
  if (max_dim != 1 && max_dim != 2) {
    throw InvalidArgument("max_dim must be 1 or 2, got " + std::to_string(max_dim));
  }
  const auto n = static_cast<std::uint32_t>(dist.size());
  std::vector<FilteredSimplex> simplices;
  std::size_t estimate = n + static_cast<std::size_t>(n) * (n - 1) / 2;
  if (max_dim == 2) estimate += static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 6;
  simplices.reserve(estimate);

  for (std::uint32_t i = 0; i < n; ++i) simplices.push_back({Simplex::vertex(i), 0.0});
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double dij = dist(i, j);
      if (dij == kBlocked) continue;
      simplices.push_back({Simplex{{i, j, 0}, 2}, dij});
      if (max_dim < 2) continue;
      for (std::uint32_t k = j + 1; k < n; ++k) {
        const double dik = dist(i, k);
        const double djk = dist(j, k);
        if (dik == kBlocked || djk == kBlocked) continue;
        simplices.push_back({Simplex{{i, j, k}, 3}, std::max({dij, dik, djk})});
      }
    }
  }
  return FilteredComplex(n, std::move(simplices));
}

std::vector<Simplex> complex_at_threshold(const FilteredComplex& fc, double eps) {
  std::vector<Simplex> out;
  for (const auto& s : fc.simplices()) {
    if (s.value > eps) break;
    out.push_back(s.simplex);
  }
  return out;
}

}  // namespace rtdtopo
