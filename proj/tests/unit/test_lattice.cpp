#include <doctest.h>

#include <cmath>
#include <set>

#include "nlslab/lattice.hpp"

using namespace nlslab;

TEST_SUITE("lattice") {

TEST_CASE("japanese bracket") {
  const int zero3[] = {0, 0, 0};
  CHECK(japanese_bracket(zero3) == doctest::Approx(1.0).epsilon(1e-15));
  const int a[] = {3, 4, 0};
  CHECK(japanese_bracket(a) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-15));
  const int b[] = {1, 1, 1, 1};
  CHECK(japanese_bracket(b) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("mode count and lex enumeration round trip") {
  LatticeSpec spec(3, 2);
  CHECK(spec.mode_count() == 125);
  std::int64_t seen = 0;
  std::int64_t last = -1;
  for_each_mode(spec, [&](std::int64_t idx, std::span<const int> n) {
    CHECK(idx == last + 1);
    CHECK(spec.index_of(n) == idx);
    CHECK(spec.coords_of(idx) == std::vector<int>(n.begin(), n.end()));
    last = idx;
    ++seen;
  });
  CHECK(seen == 125);
  // lexicographic: first mode is (-M,..,-M), last is (M,..,M)
  CHECK(spec.coords_of(0) == std::vector<int>{-2, -2, -2});
  CHECK(spec.coords_of(124) == std::vector<int>{2, 2, 2});
}

TEST_CASE("dyadic blocks partition the lattice") {
  LatticeSpec spec(2, 9);
  const auto blocks = dyadic_blocks(spec);
  CHECK(blocks == std::vector<int>{1, 2, 4, 8, 16});
  std::int64_t covered = 0;
  for_each_mode(spec, [&](std::int64_t, std::span<const int> n) {
    int hits = 0;
    for (int N : blocks)
      if (dyadic_block_of(n) == N) ++hits;
    CHECK(hits == 1);
    ++covered;
  });
  CHECK(covered == spec.mode_count());
  // block membership convention: sup-norm 5 lies in block 8
  const int m[] = {5, 0};
  CHECK(dyadic_block_of(m) == 8);
}

TEST_CASE("cube decomposition: one-cube tiling, d=1 M=1 side=3") {
  const auto dec = cube_decomposition(LatticeSpec(1, 1), 3);
  REQUIRE(dec.cubes.size() == 1);
  CHECK(dec.cubes[0].corner == std::vector<int>{-1});
  CHECK(dec.adjacency[0] == std::vector<int>{0});  // self-adjacent
}

TEST_CASE("cube decomposition: d=2 M=3 side=2 gives 16 cubes") {
  const auto dec = cube_decomposition(LatticeSpec(2, 3), 2);
  CHECK(dec.cubes.size() == 16);
}

TEST_CASE("cube tiling covers every mode exactly once") {
  for (int side : {1, 2, 3, 5}) {
    const LatticeSpec spec(2, 4);
    const auto dec = cube_decomposition(spec, side);
    for_each_mode(spec, [&](std::int64_t, std::span<const int> n) {
      int hits = 0;
      for (const auto& cube : dec.cubes) {
        bool in = true;
        for (int i = 0; i < spec.d; ++i)
          if (n[i] < cube.corner[i] || n[i] >= cube.corner[i] + side) in = false;
        if (in) ++hits;
      }
      CHECK(hits == 1);
      // cube_index_of agrees with the membership scan
      const Cube& c = dec.cubes[size_t(cube_index_of(dec, n))];
      for (int i = 0; i < spec.d; ++i) {
        CHECK(n[i] >= c.corner[i]);
        CHECK(n[i] < c.corner[i] + side);
      }
    });
  }
}

TEST_CASE("adjacency is symmetric and bounded by a d-dependent constant") {
  for (int side : {1, 2, 4}) {
    const LatticeSpec spec(2, 8);
    const auto dec = cube_decomposition(spec, side);
    size_t max_neighbors = 0;
    for (size_t j = 0; j < dec.cubes.size(); ++j) {
      max_neighbors = std::max(max_neighbors, dec.adjacency[j].size());
      for (int k : dec.adjacency[j]) {
        const auto& row = dec.adjacency[size_t(k)];
        CHECK(std::find(row.begin(), row.end(), int(j)) != row.end());
      }
    }
    // per axis at most 7 offsets can meet [-2*side, 2*side]
    CHECK(max_neighbors <= size_t(std::pow(7, spec.d)));
  }
}

}  // TEST_SUITE
