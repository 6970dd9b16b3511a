#pragma once

// Seeded Gaussian randomization of initial data: coefficients
// g_n(omega) / <n>^{d-1-alpha} on the truncated lattice, plus the
// deterministic all-ones profile.
//
// The generator is counter-based: each draw is a pure function of
// (seed, mode index), so per-mode sampling is order-independent and safe to
// fan out across threads. g_n is a standard complex Gaussian with
// E g_n = 0, E|g_n|^2 = 1 (Re/Im independent N(0, 1/2)).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/lattice.hpp"

namespace nlslab {

inline constexpr const char* kGeneratorTag = "sm64-boxmuller-v1";

namespace rng {

// SplitMix64 evaluated at an arbitrary counter position.
inline std::uint64_t uniform_bits(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in (0, 1); never returns 0, so logs are safe.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return (double(uniform_bits(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard complex Gaussian: sqrt(-log U1) * e^{2*pi*i*U2}; |g|^2 ~ Exp(1).
inline std::complex<double> complex_gaussian(std::uint64_t seed,
                                             std::uint64_t index) {
  const double u1 = uniform01(seed, 2 * index);
  const double u2 = uniform01(seed, 2 * index + 1);
  const double r = std::sqrt(-std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

// Derives an independent stream seed (per sample / per purpose).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  return uniform_bits(seed ^ 0xa5a5a5a55a5a5a5aULL, stream);
}

}  // namespace rng

struct GaussianDraw {
  std::uint64_t seed = 0;
  std::vector<std::complex<double>> g;  // one per mode, lex order
};

inline GaussianDraw gaussian_draw(const LatticeSpec& spec, std::uint64_t seed) {
  GaussianDraw draw;
  draw.seed = seed;
  draw.g.resize(size_t(spec.mode_count()));
  for (std::int64_t i = 0; i < spec.mode_count(); ++i)
    draw.g[size_t(i)] = rng::complex_gaussian(seed, std::uint64_t(i));
  return draw;
}

struct RandomField {
  ModelParams params;
  GaussianDraw draw;
  FourierField field;  // g_n / <n>^{d-1-alpha}
};

// Randomized data truncated to the lattice; deterministic given the seed.
inline RandomField sample(const ModelParams& params, std::uint64_t seed) {
  RandomField out;
  out.params = params;
  const LatticeSpec spec = params.lattice();
  out.draw = gaussian_draw(spec, seed);
  out.field = FourierField(spec);
  const double expo = params.d - 1.0 - params.alpha;
  for_each_mode(spec, [&](std::int64_t idx, std::span<const int> n) {
    out.field.coeffs[size_t(idx)] =
        out.draw.g[size_t(idx)] * std::pow(japanese_bracket(n), -expo);
  });
  return out;
}

// The profile with all-ones numerators over the same bracket weights;
// replacing the numerators by g_n reproduces sample() in distribution.
inline FourierField deterministic_profile(const ModelParams& params) {
  const LatticeSpec spec = params.lattice();
  FourierField out(spec);
  const double expo = params.d - 1.0 - params.alpha;
  for_each_mode(spec, [&](std::int64_t idx, std::span<const int> n) {
    out.coeffs[size_t(idx)] = std::pow(japanese_bracket(n), -expo);
  });
  return out;
}

}  // namespace nlslab
