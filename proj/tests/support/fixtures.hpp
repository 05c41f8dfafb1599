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

#include <vector>

#include "rtdtopo/core.hpp"

namespace fixture {

// Four vertices a, b, c, d; one simplex enters at each step 1..6:
// ab, bc, ac (closes a loop), cd, bd (second loop), abc (fills the first).
inline rtdtopo::FilteredComplex four_point_table() {
  using rtdtopo::Simplex;
  return rtdtopo::FilteredComplex(
      4, {{Simplex::vertex(0), 0}, {Simplex::vertex(1), 0}, {Simplex::vertex(2), 0},
          {Simplex::vertex(3), 0}, {Simplex::edge(0, 1), 1}, {Simplex::edge(1, 2), 2},
          {Simplex::edge(0, 2), 3}, {Simplex::edge(2, 3), 4}, {Simplex::edge(1, 3), 5},
          {Simplex::triangle(0, 1, 2), 6}});
}

inline const std::vector<std::size_t> kTableBetti0 = {4, 3, 2, 2, 1, 1, 1};
inline const std::vector<std::size_t> kTableBetti1 = {0, 0, 0, 1, 1, 2, 1};

inline rtdtopo::PointCloud unit_square() {
  return rtdtopo::PointCloud(rtdtopo::Matrix(4, 2, {0, 0, 1, 0, 1, 1, 0, 1}));
}

}  // namespace fixture
