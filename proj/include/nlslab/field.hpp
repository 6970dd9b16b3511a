#pragma once

// Frequency-space fields on the truncated lattice, spectral <-> physical
// transforms, alias-free pointwise products and spatial integrals.
//
// Measure conventions on T^d = [0, 2*pi)^d with plain Lebesgue measure:
//   u(x)   = sum_n uhat(n) e^{i n.x}
//   uhat(n) = (2*pi)^{-d} Int u(x) e^{-i n.x} dx
//   Int |u|^2 dx = (2*pi)^d sum_n |uhat(n)|^2   (Plancherel)

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "nlslab/fft.hpp"
#include "nlslab/lattice.hpp"

namespace nlslab {

using cplx = std::complex<double>;

inline double torus_volume(int d) {
  return std::pow(2.0 * std::numbers::pi, d);
}

// Whether the spatial mean in the renormalized nonlinearity (and the gauge
// rate built from it) divides by the torus volume. Volume-normalized is the
// default; the plain integral is the documented alternative.
enum class MeanConvention { volume_normalized, unnormalized };

struct FourierField {
  LatticeSpec spec;
  std::vector<cplx> coeffs;  // lexicographic mode order

  FourierField() = default;
  explicit FourierField(const LatticeSpec& s)
      : spec(s), coeffs(size_t(s.mode_count()), cplx{0.0, 0.0}) {}

  cplx& at(std::span<const int> n) { return coeffs[size_t(spec.index_of(n))]; }
  cplx at(std::span<const int> n) const {
    return coeffs[size_t(spec.index_of(n))];
  }
  cplx& at(std::initializer_list<int> n) {
    return at(std::span<const int>(n.begin(), n.size()));
  }
  cplx at(std::initializer_list<int> n) const {
    return at(std::span<const int>(n.begin(), n.size()));
  }

  double l2_norm() const {  // L^2(T^d) norm, Plancherel
    double s = 0.0;
    for (const cplx& c : coeffs) s += std::norm(c);
    return std::sqrt(torus_volume(spec.d) * s);
  }

  FourierField& operator+=(const FourierField& o) {
    check_same_spec(o);
    for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
  }
  FourierField& operator-=(const FourierField& o) {
    check_same_spec(o);
    for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
  }
  FourierField& operator*=(cplx a) {
    for (cplx& c : coeffs) c *= a;
    return *this;
  }

  friend FourierField operator+(FourierField a, const FourierField& b) {
    return a += b;
  }
  friend FourierField operator-(FourierField a, const FourierField& b) {
    return a -= b;
  }
  friend FourierField operator*(cplx a, FourierField u) { return u *= a; }

  void check_same_spec(const FourierField& o) const {
    if (!(spec == o.spec))
      throw std::invalid_argument("FourierField: lattice specs differ");
  }
};

// Restriction to the dyadic block N (rectangular annulus). Blocks partition
// the modes, so summing project_dyadic over dyadic_blocks(spec) returns the
// field bit-exactly.
inline FourierField project_dyadic(const FourierField& u, int N) {
  if (N > 2 * u.spec.M)
    throw std::invalid_argument("project_dyadic: N exceeds 2M");
  FourierField out(u.spec);
  for_each_mode(u.spec, [&](std::int64_t idx, std::span<const int> n) {
    if (dyadic_block_of(n) == N) out.coeffs[size_t(idx)] = u.coeffs[size_t(idx)];
  });
  return out;
}

// Restriction to an axis-aligned cube (used by the trilinear cube analysis).
inline FourierField project_cube(const FourierField& u, const Cube& cube) {
  FourierField out(u.spec);
  for_each_mode(u.spec, [&](std::int64_t idx, std::span<const int> n) {
    for (int i = 0; i < u.spec.d; ++i) {
      if (n[i] < cube.corner[i] || n[i] >= cube.corner[i] + cube.side) return;
    }
    out.coeffs[size_t(idx)] = u.coeffs[size_t(idx)];
  });
  return out;
}

namespace detail {

inline std::vector<int> grid_dims(int d, int G) {
  return std::vector<int>(size_t(d), G);
}

// Physical row-major index of mode n on a G-per-axis grid (wrap-around).
inline std::int64_t wrap_index(std::span<const int> n, int G) {
  std::int64_t idx = 0;
  for (int v : n) {
    const int k = v >= 0 ? v : v + G;
    idx = idx * G + k;
  }
  return idx;
}

}  // namespace detail

// Samples of u on the uniform G^d grid x_j = 2*pi*j/G (row-major).
// Exact for trigonometric polynomials of degree <= M; refuses undersampled
// grids, which would alias.
inline std::vector<cplx> to_physical(const FourierField& u, int G) {
  if (G < 2 * u.spec.M + 1)
    throw std::invalid_argument("to_physical: grid smaller than 2M+1 aliases");
  std::int64_t total = 1;
  for (int i = 0; i < u.spec.d; ++i) total *= G;
  std::vector<cplx> grid(size_t(total), cplx{0.0, 0.0});
  for_each_mode(u.spec, [&](std::int64_t idx, std::span<const int> n) {
    grid[size_t(detail::wrap_index(n, G))] = u.coeffs[size_t(idx)];
  });
  fft_inplace(grid, detail::grid_dims(u.spec.d, G), FFTW_BACKWARD);
  return grid;
}

// Inverse of to_physical on the same grid; truncates to |n_i| <= M.
inline FourierField from_physical(const LatticeSpec& spec,
                                  std::vector<cplx> samples, int G) {
  if (G < 2 * spec.M + 1)
    throw std::invalid_argument("from_physical: grid smaller than 2M+1");
  std::int64_t total = 1;
  for (int i = 0; i < spec.d; ++i) total *= G;
  if (std::ssize(samples) != total)
    throw std::invalid_argument("from_physical: sample count mismatch");
  fft_inplace(samples, detail::grid_dims(spec.d, G), FFTW_FORWARD);
  const double inv = 1.0 / double(total);
  FourierField out(spec);
  for_each_mode(spec, [&](std::int64_t idx, std::span<const int> n) {
    out.coeffs[size_t(idx)] = samples[size_t(detail::wrap_index(n, G))] * inv;
  });
  return out;
}

// Fourier coefficients of v1 * (v2 or conj v2) * v3, truncated back to the
// lattice. A product of three degree-M polynomials has degree 3M, so any
// grid with G >= 4M+1 recovers the |n_i| <= M window alias-free; grid = 0
// picks a fast size automatically.
inline FourierField triple_product(const FourierField& v1, bool conj_v2,
                                   const FourierField& v2,
                                   const FourierField& v3, int grid = 0) {
  v1.check_same_spec(v2);
  v1.check_same_spec(v3);
  const int G = grid > 0 ? grid : next_fast_size(4 * v1.spec.M + 1);
  if (G < 4 * v1.spec.M + 1)
    throw std::invalid_argument("triple_product: grid below 4M+1 aliases");
  if (&v1 == &v2 && &v2 == &v3) {  // common cubic case: one transform
    std::vector<cplx> a = to_physical(v1, G);
    for (cplx& z : a) z *= conj_v2 ? std::norm(z) : z * z;
    return from_physical(v1.spec, std::move(a), G);
  }
  std::vector<cplx> a = to_physical(v1, G);
  std::vector<cplx> b = to_physical(v2, G);
  std::vector<cplx> c = to_physical(v3, G);
  if (conj_v2) {
    for (size_t i = 0; i < a.size(); ++i) a[i] *= std::conj(b[i]) * c[i];
  } else {
    for (size_t i = 0; i < a.size(); ++i) a[i] *= b[i] * c[i];
  }
  return from_physical(v1.spec, std::move(a), G);
}

// Int_{T^d} conj(v2) v3 dx = (2*pi)^d sum_n conj(v2hat(n)) v3hat(n).
inline cplx inner_integral(const FourierField& v2, const FourierField& v3) {
  v2.check_same_spec(v3);
  cplx s{0.0, 0.0};
  for (size_t i = 0; i < v2.coeffs.size(); ++i)
    s += std::conj(v2.coeffs[i]) * v3.coeffs[i];
  return torus_volume(v2.spec.d) * s;
}

// The spatial mean used by the renormalized nonlinearity under the given
// convention: Int conj(v2) v3 dx, divided by (2*pi)^d when normalized.
inline cplx mean_integral(const FourierField& v2, const FourierField& v3,
                          MeanConvention conv) {
  cplx s = inner_integral(v2, v3);
  if (conv == MeanConvention::volume_normalized) s /= torus_volume(v2.spec.d);
  return s;
}

// Model parameters: dimension, defocusing/focusing sign, randomization
// smoothing alpha, target regularity s, truncation M and time horizon delta.
struct ModelParams {
  int d = 3;
  int rho = 1;  // +1 defocusing, -1 focusing
  double alpha = 0.0;
  double s = 0.5;
  int M = 8;
  double delta = 0.02;
  MeanConvention mean_convention = MeanConvention::volume_normalized;

  double scaling_critical() const { return 0.5 * d - 1.0; }  // cubic: p = 3

  // Probabilistic regularity window; only d >= 3 is covered.
  double regularity_gain() const {
    if (d == 3) return 1.0 / 7.0;
    if (d == 4) return 4.0 / 19.0;
    if (d >= 5) return 0.25;
    return 0.0;
  }

  bool admissible() const {
    if (d < 3 || std::abs(rho) != 1 || M < 1 || delta <= 0.0) return false;
    const double sc = scaling_critical(), sr = regularity_gain();
    return alpha >= 0.0 && alpha < sr && s >= sc && s < sc + sr - alpha;
  }

  LatticeSpec lattice() const { return LatticeSpec(d, M); }
};

// Time-grid-indexed sequence of frames on [0, delta].
struct SpaceTimeField {
  ModelParams params;
  std::vector<double> times;        // strictly increasing, t_0 = 0
  std::vector<FourierField> frames;  // one per node, shared lattice spec

  size_t nodes() const { return times.size(); }

  bool uniform_grid(double rel_tol = 1e-9) const {
    if (times.size() < 2) return true;
    const double dt = times[1] - times[0];
    for (size_t k = 1; k + 1 < times.size(); ++k)
      if (std::abs(times[k + 1] - times[k] - dt) > rel_tol * std::abs(dt))
        return false;
    return true;
  }

  double dt() const {
    if (times.size() < 2) throw std::logic_error("SpaceTimeField: single node");
    return times[1] - times[0];
  }

  void validate() const {
    if (times.size() != frames.size() || times.empty())
      throw std::invalid_argument("SpaceTimeField: times/frames mismatch");
    for (size_t k = 0; k + 1 < times.size(); ++k)
      if (!(times[k] < times[k + 1]))
        throw std::invalid_argument("SpaceTimeField: times not increasing");
    for (const auto& f : frames) frames.front().check_same_spec(f);
  }
};

inline std::vector<double> uniform_times(double delta, size_t node_count) {
  if (node_count < 2 || delta <= 0.0)
    throw std::invalid_argument("uniform_times: need delta > 0, >= 2 nodes");
  std::vector<double> t(node_count);
  for (size_t k = 0; k < node_count; ++k)
    t[k] = delta * double(k) / double(node_count - 1);
  return t;
}

}  // namespace nlslab
