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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rtdtopo/errors.hpp"
#include "rtdtopo/persistence.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace rtdtopo;

namespace {

FilteredComplex rips(const Matrix& x, int max_dim = 2) {
  return build_vr_filtration(pairwise_distances(PointCloud(x)), max_dim);
}

oracle::Betti rank_oracle(const FilteredComplex& fc, double eps) {
  std::vector<oracle::Verts> simplices;
  for (const auto& s : complex_at_threshold(fc, eps))
    simplices.emplace_back(s.verts().begin(), s.verts().end());
  return oracle::betti(simplices);
}

std::multiset<std::pair<double, double>> bars(const Barcode& bc, int dim) {
  std::multiset<std::pair<double, double>> out;
  for (const auto& p : bc.in_dim(dim)) out.insert({p.birth, p.death});
  return out;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("two points give one finite and one infinite H0 bar") {
  auto bc = compute_persistence(rips(Matrix(2, 1, {0, 1.75})));
  CHECK(bars(bc, 0) == std::multiset<std::pair<double, double>>{{0, 1.75}, {0, kInfinity}});
  CHECK(bc.in_dim(1).empty());
}

TEST_CASE("unit square has the single loop [1, sqrt 2)") {
  auto bc = compute_persistence(rips(fixture::unit_square().points()));
  auto h1 = bc.in_dim(1);
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == 1.0);
  CHECK(h1[0].death == std::sqrt(2.0));
  CHECK(betti_at(bc, 1, 1.2) == 1);
  CHECK(betti_at(bc, 1, 0.5) == 0);
  CHECK(betti_at(bc, 1, 1.5) == 0);
}

TEST_CASE("four-point Betti table") {
  auto fc = fixture::four_point_table();
  auto bc = compute_persistence(fc);
  for (int step = 0; step <= 6; ++step) {
    CAPTURE(step);
    CHECK(betti_at(bc, 0, step) == fixture::kTableBetti0[step]);
    CHECK(betti_at(bc, 1, step) == fixture::kTableBetti1[step]);
  }
}

TEST_CASE("below the first edge every vertex is its own component") {
  std::mt19937_64 rng(2);
  auto x = oracle::random_matrix(6, 2, rng);
  auto bc = compute_persistence(rips(x));
  auto d = oracle::distances(x);
  double first = INFINITY;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) first = std::min(first, d(i, j));
  CHECK(betti_at(bc, 0, first * 0.5) == 6);
}

TEST_CASE("betti numbers agree with the rank oracle") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<std::size_t> n_dist(3, 7), d_dist(1, 3);
    auto fc = rips(oracle::random_matrix(n_dist(rng), d_dist(rng), rng));
    auto bc = compute_persistence(fc);
    for (double eps : fc.critical_values()) {
      auto want = rank_oracle(fc, eps);
      CHECK(betti_at(bc, 0, eps) == want.b0);
      CHECK(betti_at(bc, 1, eps) == want.b1);
    }
  }
}

TEST_CASE("ties and duplicates agree with the rank oracle") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> ud(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    Matrix x(6, 2);
    for (double& v : x.values()) v = ud(rng);
    auto fc = rips(x);
    auto bc = compute_persistence(fc);
    for (double eps : fc.critical_values()) {
      auto want = rank_oracle(fc, eps);
      CHECK(betti_at(bc, 0, eps) == want.b0);
      CHECK(betti_at(bc, 1, eps) == want.b1);
    }
  }
}

TEST_CASE("clearing does not change the pairing") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> ud(0, 3);
    Matrix x(9, 2);
    for (double& v : x.values()) v = trial % 2 ? ud(rng) : std::normal_distribution<>()(rng);
    auto fc = rips(x);
    auto with = reduce_boundary(fc, {.clearing = true});
    auto without = reduce_boundary(fc, {.clearing = false});
    REQUIRE(with.size() == without.size());
    for (std::size_t i = 0; i < with.size(); ++i) {
      CHECK(with[i].birth == without[i].birth);
      CHECK(with[i].death == without[i].death);
    }
  }
}

TEST_CASE("pairs are valid") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    auto fc = rips(oracle::random_matrix(8, 3, rng));
    std::map<Simplex, std::pair<double, std::size_t>> where;
    for (std::size_t i = 0; i < fc.size(); ++i) where[fc[i].simplex] = {fc[i].value, i};
    auto bc = compute_persistence(fc);
    for (const auto& p : bc.pairs) {
      CHECK(p.birth_simplex.dim() == p.dim);
      CHECK(where.at(p.birth_simplex).first == p.birth);
      if (p.infinite()) {
        CHECK(p.death == kInfinity);
        continue;
      }
      CHECK(p.death > p.birth);
      CHECK(p.death_simplex->dim() == p.dim + 1);
      CHECK(where.at(*p.death_simplex).first == p.death);
      CHECK(where.at(*p.death_simplex).second > where.at(p.birth_simplex).second);
    }
    for (const auto& p : bc.zero_length) CHECK(p.death == p.birth);
    CHECK(bc.in_dim(0).size() == 8);
  }
}

TEST_CASE("connected complex has exactly one infinite H0 bar") {
  std::mt19937_64 rng(16);
  auto bc = compute_persistence(rips(oracle::random_matrix(10, 2, rng)));
  int infinite = 0;
  for (const auto& p : bc.in_dim(0)) infinite += p.infinite();
  CHECK(infinite == 1);
}

TEST_CASE("union-find H0 equals the reduction H0") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> n_dist(2, 12);
    auto x = oracle::random_matrix(n_dist(rng), 2, rng);
    auto dist = pairwise_distances(PointCloud(x));
    CHECK(bars(zero_dim_persistence(dist), 0) ==
          bars(compute_persistence(build_vr_filtration(dist, 1)), 0));
  }
  auto two = zero_dim_persistence(pairwise_distances(PointCloud(Matrix(2, 1, {0, 3}))));
  CHECK(bars(two, 0) == std::multiset<std::pair<double, double>>{{0, 3}, {0, kInfinity}});
}

TEST_CASE("three clusters separated by 5 and 9") {
  // Clusters on a line: {0, 0.5, 1}, {6, 6.5}, {15.5, 16}.
  Matrix x(7, 1, {0, 0.5, 1, 6, 6.5, 15.5, 16});
  auto bc = compute_persistence(rips(x));
  std::vector<double> long_deaths;
  for (const auto& p : bc.in_dim(0))
    if (p.death > 1.0 && !p.infinite()) long_deaths.push_back(p.death);
  std::sort(long_deaths.begin(), long_deaths.end());
  CHECK(long_deaths == std::vector<double>{5.0, 9.0});
  CHECK(bars(zero_dim_persistence(pairwise_distances(PointCloud(x))), 0) == bars(bc, 0));
}

TEST_CASE("small perturbations move bars by at most twice the shift") {
  std::mt19937_64 rng(18);
  const double delta = 1e-7;
  for (int trial = 0; trial < 10; ++trial) {
    auto x = oracle::random_matrix(8, 2, rng);
    Matrix y = x;
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (double& v : y.values()) v += delta * ud(rng) / std::sqrt(2.0);
    auto a = compute_persistence(rips(x));
    auto b = compute_persistence(rips(y));
    // Same pairing by simplex: no tie crossed at this scale.
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
      REQUIRE(a.pairs[i].birth_simplex == b.pairs[i].birth_simplex);
      CHECK(std::abs(a.pairs[i].birth - b.pairs[i].birth) <= 2 * delta);
      if (!a.pairs[i].infinite()) CHECK(std::abs(a.pairs[i].death - b.pairs[i].death) <= 2 * delta);
    }
  }
}

TEST_CASE("non-monotone complexes are rejected") {
  FilteredComplex bad(2, {{Simplex::vertex(0), 0}, {Simplex::edge(0, 1), 1},
                          {Simplex::vertex(1), 2}});
  CHECK_THROWS_AS(compute_persistence(bad), DataError);
}

TEST_CASE("barcode csv") {
  std::ostringstream out;
  write_barcode_csv(out, compute_persistence(rips(fixture::unit_square().points())));
  const auto text = out.str();
  CHECK(text.rfind("dim,birth,death\n", 0) == 0);
  CHECK(text.find("0,0,inf\n") != std::string::npos);
  CHECK(text.find("1,1,1.4142135623730951\n") != std::string::npos);
}

TEST_CASE("max_hom_dim 0 skips triangles") {
  auto fc = rips(fixture::unit_square().points());
  auto pairs = reduce_boundary(fc, {.clearing = true, .max_hom_dim = 0});
  for (const auto& p : pairs) CHECK(fc[p.birth].simplex.dim() == 0);
}

}
