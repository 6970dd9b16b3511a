#pragma once

// Truncated frequency lattice {n in Z^d : |n_i| <= M}, dyadic rectangular
// blocks and cube decompositions. Everything here is pure integer logic;
// fields living on the lattice are in field.hpp.
//
// Conventions (fixed once, serialized into run manifests):
//   - modes are enumerated lexicographically in (n_1, ..., n_d), each
//     coordinate running -M..M, first coordinate most significant;
//   - dyadic block N=1 holds sup-norm <= 1, block N=2^k (k>=1) holds
//     sup-norm in (2^{k-1}, 2^k]; blocks partition the mode set.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlslab {

inline constexpr const char* kLatticeConvention =
    "lex-modes;rectangular-dyadic;cube-tiling-from-corner";

struct LatticeSpec {
  int d = 1;  // dimension >= 1
  int M = 1;  // truncation radius >= 1

  LatticeSpec() = default;
  LatticeSpec(int dim, int trunc) : d(dim), M(trunc) {
    if (d < 1 || M < 1) throw std::invalid_argument("LatticeSpec: d, M >= 1");
  }

  std::int64_t modes_per_axis() const { return 2 * std::int64_t(M) + 1; }

  std::int64_t mode_count() const {
    std::int64_t c = 1;
    for (int i = 0; i < d; ++i) c *= modes_per_axis();
    return c;
  }

  bool contains(std::span<const int> n) const {
    if (std::ssize(n) != d) return false;
    for (int v : n)
      if (v < -M || v > M) return false;
    return true;
  }

  // Lexicographic index of a mode; inverse below.
  std::int64_t index_of(std::span<const int> n) const {
    std::int64_t idx = 0;
    const std::int64_t base = modes_per_axis();
    for (int i = 0; i < d; ++i) {
      if (n[i] < -M || n[i] > M) throw std::out_of_range("mode outside lattice");
      idx = idx * base + (n[i] + M);
    }
    return idx;
  }

  std::vector<int> coords_of(std::int64_t idx) const {
    std::vector<int> n(d);
    const std::int64_t base = modes_per_axis();
    for (int i = d - 1; i >= 0; --i) {
      n[i] = int(idx % base) - M;
      idx /= base;
    }
    return n;
  }

  bool operator==(const LatticeSpec&) const = default;
};

// Visits all modes in lexicographic order without materializing coordinates
// per call; `f` receives (index, coords).
template <class F>
void for_each_mode(const LatticeSpec& spec, F&& f) {
  std::vector<int> n(spec.d, -spec.M);
  const std::int64_t count = spec.mode_count();
  for (std::int64_t idx = 0; idx < count; ++idx) {
    f(idx, std::span<const int>(n));
    for (int i = spec.d - 1; i >= 0; --i) {
      if (n[i] < spec.M) {
        ++n[i];
        break;
      }
      n[i] = -spec.M;
    }
  }
}

inline std::int64_t sq_norm(std::span<const int> n) {
  std::int64_t s = 0;
  for (int v : n) s += std::int64_t(v) * v;
  return s;
}

inline int sup_norm(std::span<const int> n) {
  int s = 0;
  for (int v : n) s = std::max(s, std::abs(v));
  return s;
}

// <n> = sqrt(1 + |n|^2)
inline double japanese_bracket(std::span<const int> n) {
  return std::sqrt(1.0 + double(sq_norm(n)));
}

// Dyadic numbers 1, 2, 4, ...
struct DyadicBlock {
  int N = 1;
};

// The unique dyadic block containing a mode of the given sup-norm.
inline int dyadic_block_of(int sup) {
  if (sup <= 1) return 1;
  int N = 2;
  while (N < sup) N *= 2;
  return N;
}

inline int dyadic_block_of(std::span<const int> n) {
  return dyadic_block_of(sup_norm(n));
}

// All blocks meeting the truncated lattice: 1, 2, ..., bit_ceil(M).
inline std::vector<int> dyadic_blocks(const LatticeSpec& spec) {
  std::vector<int> out{1};
  for (int N = 2; N / 2 < spec.M; N *= 2) out.push_back(N);
  return out;
}

// Axis-aligned cube of given side length; covers corner..corner+side-1
// per axis (intersected with the lattice when enumerating members).
struct Cube {
  std::vector<int> corner;
  int side = 1;
};

struct CubeDecomposition {
  LatticeSpec spec;
  int side = 1;
  std::vector<Cube> cubes;
  // adjacency[j] lists k with C_j ~ C_k (symmetric, may include j itself)
  std::vector<std::vector<int>> adjacency;
};

// C_j ~ C_k iff the sum set {c1 + c2} meets the Fourier support of
// P_{<= 2*side}, i.e. [-2*side, 2*side]^d. Uses the full (unclipped) cube
// extent per axis.
inline bool cubes_adjacent(const Cube& a, const Cube& b, int side) {
  for (size_t i = 0; i < a.corner.size(); ++i) {
    const std::int64_t lo = std::int64_t(a.corner[i]) + b.corner[i];
    const std::int64_t hi = lo + 2 * (side - 1);
    if (hi < -2 * std::int64_t(side) || lo > 2 * std::int64_t(side)) return false;
  }
  return true;
}

// Tiles [-M, M]^d by cubes of the given side, corners at -M + j*side.
inline CubeDecomposition cube_decomposition(const LatticeSpec& spec, int side) {
  if (side < 1) throw std::invalid_argument("cube_decomposition: side >= 1");
  CubeDecomposition out;
  out.spec = spec;
  out.side = side;
  const int per_axis = int((2 * spec.M + 1 + side - 1) / side);

  std::vector<int> cell(spec.d, 0);
  std::int64_t total = 1;
  for (int i = 0; i < spec.d; ++i) total *= per_axis;
  for (std::int64_t c = 0; c < total; ++c) {
    Cube cube;
    cube.side = side;
    cube.corner.resize(spec.d);
    for (int i = 0; i < spec.d; ++i) cube.corner[i] = -spec.M + cell[i] * side;
    out.cubes.push_back(std::move(cube));
    for (int i = spec.d - 1; i >= 0; --i) {
      if (++cell[i] < per_axis) break;
      cell[i] = 0;
    }
  }

  out.adjacency.resize(out.cubes.size());
  for (size_t j = 0; j < out.cubes.size(); ++j)
    for (size_t k = 0; k < out.cubes.size(); ++k)
      if (cubes_adjacent(out.cubes[j], out.cubes[k], side))
        out.adjacency[j].push_back(int(k));
  return out;
}

// Index of the tile containing mode n.
inline int cube_index_of(const CubeDecomposition& dec, std::span<const int> n) {
  const int per_axis = int((2 * dec.spec.M + 1 + dec.side - 1) / dec.side);
  int idx = 0;
  for (int i = 0; i < dec.spec.d; ++i) {
    const int cell = (n[i] + dec.spec.M) / dec.side;
    idx = idx * per_axis + cell;
  }
  return idx;
}

}  // namespace nlslab
