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

#include "rtdtopo/persistence.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "rtdtopo/errors.hpp"
#include "rtdtopo/io.hpp"
#include "union_find.hpp"

namespace rtdtopo {
namespace {

using Column = std::vector<std::uint32_t>;

// Boundary columns of a filtered complex, with rows given as filtration
// indices sorted ascending.
class BoundaryMatrix {
 public:
  explicit BoundaryMatrix(const FilteredComplex& fc)
      : fc_(fc), n_(fc.vertex_count()), vertex_index_(n_, kEssential),
        edge_index_(n_ * n_, kEssential) {
    for (std::uint32_t idx = 0; idx < fc.size(); ++idx) {
      const auto& v = fc[idx].simplex.vertices;
      if (fc[idx].simplex.count == 1) vertex_index_[v[0]] = idx;
      if (fc[idx].simplex.count == 2) edge_index_[v[0] * n_ + v[1]] = idx;
    }
  }

  void column(std::uint32_t idx, Column& out) const {
    out.clear();
    const auto& s = fc_[idx].simplex;
    const auto& v = s.vertices;
    if (s.count == 2) {
      out.push_back(vertex_index_[v[0]]);
      out.push_back(vertex_index_[v[1]]);
    } else if (s.count == 3) {
      out.push_back(edge_index_[v[0] * n_ + v[1]]);
      out.push_back(edge_index_[v[0] * n_ + v[2]]);
      out.push_back(edge_index_[v[1] * n_ + v[2]]);
    }
    std::sort(out.begin(), out.end());
  }

 private:
  const FilteredComplex& fc_;
  std::size_t n_;
  std::vector<std::uint32_t> vertex_index_;
  std::vector<std::uint32_t> edge_index_;
};

class Reducer {
 public:
  explicit Reducer(std::size_t size) : pivot_slot_(size, kEssential), death_of_(size, kEssential) {}

  // Reduces `col` in place against the stored columns. Returns true when the
  // column ends nonzero, in which case it is stored and its pivot paired.
  bool reduce(std::uint32_t idx, Column& col) {
    while (!col.empty()) {
      const std::uint32_t slot = pivot_slot_[col.back()];
      if (slot == kEssential) break;
      add_into(col, slots_[slot]);
    }
    if (col.empty()) return false;
    pivot_slot_[col.back()] = static_cast<std::uint32_t>(slots_.size());
    death_of_[col.back()] = idx;
    slots_.push_back(col);
    return true;
  }

  bool is_birth(std::uint32_t idx) const { return death_of_[idx] != kEssential; }
  std::uint32_t death_of(std::uint32_t idx) const { return death_of_[idx]; }

 private:
  void add_into(Column& col, const Column& other) {
    scratch_.clear();
    std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                  std::back_inserter(scratch_));
    col.swap(scratch_);
  }

  std::vector<std::uint32_t> pivot_slot_;
  std::vector<std::uint32_t> death_of_;
  std::vector<Column> slots_;
  Column scratch_;
};

}  // namespace

std::vector<IndexPair> reduce_boundary(const FilteredComplex& fc, ReductionOptions options) {
  fc.check_monotone();
  const auto size = static_cast<std::uint32_t>(fc.size());
  const int top_column_dim = std::min(options.max_hom_dim + 1, fc.max_dim());
  BoundaryMatrix boundary(fc);
  Reducer reducer(size);
  std::vector<bool> negative(size, false);
  Column col;

  auto process = [&](std::uint32_t idx) {
    boundary.column(idx, col);
    if (reducer.reduce(idx, col)) negative[idx] = true;
  };

  if (options.clearing) {
    for (int d = top_column_dim; d >= 1; --d) {
      for (std::uint32_t idx = 0; idx < size; ++idx) {
        if (fc[idx].simplex.dim() != d || reducer.is_birth(idx)) continue;
        process(idx);
      }
    }
  } else {
    for (std::uint32_t idx = 0; idx < size; ++idx) {
      const int d = fc[idx].simplex.dim();
      if (d >= 1 && d <= top_column_dim) process(idx);
    }
  }

  std::vector<IndexPair> pairs;
  for (std::uint32_t idx = 0; idx < size; ++idx) {
    if (fc[idx].simplex.dim() > options.max_hom_dim || negative[idx]) continue;
    pairs.push_back({idx, reducer.death_of(idx)});
  }
  return pairs;
}

Barcode compute_persistence(const FilteredComplex& fc, ReductionOptions options) {
  Barcode bc;
  bc.max_dim_computed = fc.max_dim();
  for (const auto& ip : reduce_boundary(fc, options)) {
    const auto& b = fc[ip.birth];
    PersistencePair pair;
    pair.dim = b.simplex.dim();
    pair.birth = b.value;
    pair.birth_simplex = b.simplex;
    if (ip.death != kEssential) {
      pair.death = fc[ip.death].value;
      pair.death_simplex = fc[ip.death].simplex;
    }
    (pair.death > pair.birth ? bc.pairs : bc.zero_length).push_back(pair);
  }
  return bc;
}

std::vector<PersistencePair> Barcode::in_dim(int dim) const {
  std::vector<PersistencePair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out),
               [dim](const PersistencePair& p) { return p.dim == dim; });
  return out;
}

double Barcode::total_finite_length(int dim) const {
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (p.dim == dim && !p.infinite()) sum += p.length();
  }
  return sum;
}

std::size_t betti_at(const Barcode& bc, int dim, double eps) {
  return static_cast<std::size_t>(
      std::count_if(bc.pairs.begin(), bc.pairs.end(), [&](const PersistencePair& p) {
        return p.dim == dim && p.birth <= eps && eps < p.death;
      }));
}

Barcode zero_dim_persistence(const DistanceMatrix& dist) {
  const auto n = static_cast<std::uint32_t>(dist.size());
  struct Edge {
    double value;
    std::uint32_t a, b;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (dist(i, j) != kBlocked) edges.push_back({dist(i, j), i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.value, x.a, x.b) < std::tie(y.value, y.a, y.b);
  });

  Barcode bc;
  bc.max_dim_computed = 1;
  UnionFind uf(n);
  for (const auto& e : edges) {
    const auto ra = uf.find(e.a);
    const auto rb = uf.find(e.b);
    if (ra == rb) continue;
    // Elder rule: the component whose oldest vertex is younger dies.
    const auto young = std::max(uf.oldest(ra), uf.oldest(rb));
    uf.unite(ra, rb);
    PersistencePair p;
    p.dim = 0;
    p.birth = 0.0;
    p.death = e.value;
    p.birth_simplex = Simplex::vertex(young);
    p.death_simplex = Simplex::edge(e.a, e.b);
    (p.death > p.birth ? bc.pairs : bc.zero_length).push_back(p);
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    if (uf.find(v) == v) {
      PersistencePair p;
      p.birth_simplex = Simplex::vertex(uf.oldest(v));
      bc.pairs.push_back(p);
    }
  }
  return bc;
}

void write_barcode_csv(std::ostream& out, const Barcode& bc) {
  out << "dim,birth,death\n";
  for (const auto& p : bc.pairs) {
    out << p.dim << ',' << format_double(p.birth) << ','
        << (p.infinite() ? std::string("inf") : format_double(p.death)) << '\n';
  }
}

}  // namespace rtdtopo
