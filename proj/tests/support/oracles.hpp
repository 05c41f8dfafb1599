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

// Slow reference implementations used only by the tests. None of them share
// code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "rtdtopo/matrix.hpp"

namespace oracle {

using Verts = std::vector<std::uint32_t>;

inline rtdtopo::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                     std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  rtdtopo::Matrix m(rows, cols);
  for (double& v : m.values()) v = nd(rng);
  return m;
}

inline rtdtopo::Matrix uniform_matrix(std::size_t rows, std::size_t cols,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  rtdtopo::Matrix m(rows, cols);
  for (double& v : m.values()) v = ud(rng);
  return m;
}

inline double distance(const rtdtopo::Matrix& x, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    s += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
  }
  return std::sqrt(s);
}

inline rtdtopo::Matrix distances(const rtdtopo::Matrix& x) {
  rtdtopo::Matrix d(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) d(i, j) = i == j ? 0.0 : distance(x, i, j);
  return d;
}

// Every vertex subset of size <= max_dim + 1 with its Rips value.
inline std::map<Verts, double> brute_rips(const rtdtopo::Matrix& d, int max_dim) {
  std::map<Verts, double> out;
  const std::size_t n = d.rows();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    Verts v;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask >> i & 1) v.push_back(i);
    if (static_cast<int>(v.size()) > max_dim + 1) continue;
    double val = 0.0;
    bool blocked = false;
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t b = a + 1; b < v.size(); ++b) {
        if (std::isinf(d(v[a], v[b]))) blocked = true;
        val = std::max(val, d(v[a], v[b]));
      }
    if (!blocked) out[v] = val;
  }
  return out;
}

// Rank over Z/2 by Gaussian elimination on dense 0/1 rows.
inline std::size_t rank_z2(std::vector<std::vector<char>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && !rows[piv][c]) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][c]) {
        for (std::size_t k = 0; k < cols; ++k) rows[r][k] ^= rows[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

// Rank of the boundary map from p-simplices to (p-1)-simplices.
inline std::size_t boundary_rank(const std::vector<Verts>& hi, const std::vector<Verts>& lo) {
  if (hi.empty() || lo.empty()) return 0;
  std::map<Verts, std::size_t> index;
  for (std::size_t i = 0; i < lo.size(); ++i) index[lo[i]] = i;
  std::vector<std::vector<char>> rows(hi.size(), std::vector<char>(lo.size(), 0));
  for (std::size_t r = 0; r < hi.size(); ++r) {
    for (std::size_t skip = 0; skip < hi[r].size(); ++skip) {
      Verts face;
      for (std::size_t k = 0; k < hi[r].size(); ++k)
        if (k != skip) face.push_back(hi[r][k]);
      rows[r][index.at(face)] ^= 1;
    }
  }
  return rank_z2(rows);
}

struct Betti {
  std::size_t b0 = 0;
  std::size_t b1 = 0;
};

// Betti numbers of a simplicial complex given as vertex lists (dim <= 2).
inline Betti betti(const std::vector<Verts>& simplices) {
  std::vector<Verts> by_dim[3];
  for (const auto& s : simplices) by_dim[s.size() - 1].push_back(s);
  const std::size_t r1 = boundary_rank(by_dim[1], by_dim[0]);
  const std::size_t r2 = boundary_rank(by_dim[2], by_dim[1]);
  return {by_dim[0].size() - r1, by_dim[1].size() - r1 - r2};
}

// Cross-matrix entry and its origin, rebuilt block by block.
struct CrossEntry {
  double value;
  char tag;  // 'z' zero block, 'p' w_+, 'w' min from w, 't' min from w~, 'x' blocked
  std::size_t i;
  std::size_t j;
};

inline CrossEntry cross_entry(const rtdtopo::Matrix& w, const rtdtopo::Matrix& wt,
                              std::size_t r, std::size_t c) {
  const std::size_t n = w.rows();
  const bool top = r < n;
  const bool left = c < n;
  if (top && left) return {0.0, 'z', r, c};
  if (!top && !left) {
    const std::size_t i = r - n, j = c - n;
    if (wt(i, j) < w(i, j)) return {wt(i, j), 't', i, j};
    return {w(i, j), 'w', i, j};
  }
  // Bottom-left holds w_+ at (N + i, j); top-right is its transpose.
  const std::size_t i = top ? c - n : r - n;
  const std::size_t j = top ? r : c;
  if (i > j) return {INFINITY, 'x', i, j};
  return {w(i, j), 'p', i, j};
}

inline double central_difference(const std::function<double(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

// logit_scale * cos(x_i, c_k) by explicit loops.
inline rtdtopo::Matrix cosine_logits(const rtdtopo::Matrix& x, const rtdtopo::Matrix& c,
                                     double scale) {
  rtdtopo::Matrix out(x.rows(), c.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < c.rows(); ++k) {
      double xy = 0, xx = 0, yy = 0;
      for (std::size_t d = 0; d < x.cols(); ++d) {
        xy += x(i, d) * c(k, d);
        xx += x(i, d) * x(i, d);
        yy += c(k, d) * c(k, d);
      }
      out(i, k) = scale * xy / std::sqrt(xx * yy);
    }
  }
  return out;
}

}  // namespace oracle
