#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlslab/field.hpp"
#include "nlslab/random_data.hpp"
#include "oracles.hpp"

using namespace nlslab;

namespace {
FourierField random_field(const LatticeSpec& spec, std::uint64_t seed) {
  FourierField u(spec);
  for (size_t i = 0; i < u.coeffs.size(); ++i)
    u.coeffs[i] = rng::complex_gaussian(seed, i);
  return u;
}
}  // namespace

TEST_SUITE("field") {

TEST_CASE("constant mode evaluates to a constant") {
  FourierField u(LatticeSpec(2, 3));
  u.at({0, 0}) = 1.0;
  const auto phys = to_physical(u, 8);
  for (const cplx& z : phys) {
    CHECK(std::real(z) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(std::imag(z)) < 1e-13);
  }
}

TEST_CASE("single mode gives e^{i x_1}") {
  FourierField u(LatticeSpec(2, 2));
  u.at({1, 0}) = 1.0;
  const int G = 9;
  const auto phys = to_physical(u, G);
  for (int j = 0; j < G; ++j) {
    const double x1 = 2.0 * std::numbers::pi * j / G;
    // row-major: first axis is the slow index
    const cplx got = phys[size_t(j) * G];
    CHECK(std::abs(got - std::exp(cplx(0.0, x1))) < 1e-13);
  }
}

TEST_CASE("round trip physical <-> spectral") {
  const LatticeSpec spec(3, 3);
  const FourierField u = random_field(spec, 7);
  for (int G : {7, 8, 12}) {
    const FourierField back = from_physical(spec, to_physical(u, G), G);
    double worst = 0.0;
    for (size_t i = 0; i < u.coeffs.size(); ++i)
      worst = std::max(worst, std::abs(back.coeffs[i] - u.coeffs[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("to_physical refuses undersampled grids") {
  FourierField u(LatticeSpec(2, 3));
  CHECK_THROWS_AS((void)to_physical(u, 6), std::invalid_argument);
}

TEST_CASE("Plancherel") {
  const LatticeSpec spec(2, 4);
  const FourierField u = random_field(spec, 11);
  double sum = 0.0;
  for (const cplx& c : u.coeffs) sum += std::norm(c);
  const double direct = std::sqrt(torus_volume(2) * sum);
  // quadrature of |u|^2 on an exact grid
  const int G = 9;
  const auto phys = to_physical(u, G);
  double quad = 0.0;
  for (const cplx& z : phys) quad += std::norm(z);
  quad *= torus_volume(2) / double(G * G);
  CHECK(std::sqrt(quad) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(u.l2_norm() == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("triple product of constants") {
  FourierField u(LatticeSpec(3, 2));
  const cplx c{0.7, -0.3};
  u.at({0, 0, 0}) = c;
  const FourierField w = triple_product(u, true, u, u);
  CHECK(std::abs(w.at({0, 0, 0}) - std::norm(c) * c) < 1e-14);
}

TEST_CASE("triple product of point masses lands on n1 - n2 + n3") {
  const LatticeSpec spec(2, 3);
  FourierField v1(spec), v2(spec), v3(spec);
  v1.at({2, -1}) = cplx(1.0, 1.0);
  v2.at({1, 1}) = cplx(0.0, 2.0);
  v3.at({-1, 2}) = cplx(3.0, 0.0);
  const FourierField w = triple_product(v1, true, v2, v3);
  const cplx expect = cplx(1.0, 1.0) * std::conj(cplx(0.0, 2.0)) * cplx(3.0, 0.0);
  CHECK(std::abs(w.at({0, 0}) - expect) < 1e-13);
  double off = 0.0;
  for_each_mode(spec, [&](std::int64_t idx, std::span<const int> n) {
    if (n[0] == 0 && n[1] == 0) return;
    off = std::max(off, std::abs(w.coeffs[size_t(idx)]));
  });
  CHECK(off < 1e-13);
}

TEST_CASE("triple product matches direct convolution oracle") {
  for (int d : {1, 2}) {
    const LatticeSpec spec(d, 3);
    const FourierField v1 = random_field(spec, 21);
    const FourierField v2 = random_field(spec, 22);
    const FourierField v3 = random_field(spec, 23);
    for (bool conj2 : {true, false}) {
      const FourierField fast = triple_product(v1, conj2, v2, v3);
      const FourierField slow = oracles::triple_product_direct(v1, conj2, v2, v3);
      double worst = 0.0;
      for (size_t i = 0; i < fast.coeffs.size(); ++i)
        worst = std::max(worst, std::abs(fast.coeffs[i] - slow.coeffs[i]));
      CHECK(worst < 1e-11);
    }
  }
}

TEST_CASE("triple product equals oversampled physical product, d=2 M=3") {
  const LatticeSpec spec(2, 3);
  const FourierField v1 = random_field(spec, 31);
  const FourierField v2 = random_field(spec, 32);
  const FourierField v3 = random_field(spec, 33);
  const FourierField dealiased = triple_product(v1, true, v2, v3);
  const FourierField oversampled = triple_product(v1, true, v2, v3, 4 * 3 + 1);
  double worst = 0.0;
  for (size_t i = 0; i < dealiased.coeffs.size(); ++i)
    worst = std::max(worst, std::abs(dealiased.coeffs[i] - oversampled.coeffs[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("inner integral: Plancherel normalization and orthogonality") {
  const LatticeSpec spec(2, 3);
  FourierField v(spec);
  v.at({1, 2}) = cplx(0.3, 0.4);
  v.at({-1, 0}) = cplx(0.0, 0.5);
  const double l2 = v.l2_norm();
  FourierField unit = v;
  unit *= cplx(1.0 / l2, 0.0);
  CHECK(std::abs(inner_integral(unit, unit) - cplx(1.0, 0.0)) < 1e-13);

  FourierField w(spec);  // disjoint support
  w.at({2, 2}) = cplx(1.0, -1.0);
  CHECK(std::abs(inner_integral(v, w)) < 1e-15);
}

TEST_CASE("inner integral matches grid quadrature") {
  const LatticeSpec spec(2, 3);
  const FourierField v2 = random_field(spec, 41);
  const FourierField v3 = random_field(spec, 42);
  const int G = 16;
  const auto p2 = to_physical(v2, G);
  const auto p3 = to_physical(v3, G);
  cplx quad{0.0, 0.0};
  for (size_t i = 0; i < p2.size(); ++i) quad += std::conj(p2[i]) * p3[i];
  quad *= torus_volume(2) / double(G * G);
  CHECK(std::abs(quad - inner_integral(v2, v3)) < 1e-10);
}

TEST_CASE("transforms are linear") {
  const LatticeSpec spec(2, 2);
  const FourierField a = random_field(spec, 51);
  const FourierField b = random_field(spec, 52);
  const cplx s{0.6, -1.1};
  const auto pa = to_physical(a, 5);
  const auto pb = to_physical(b, 5);
  const auto pab = to_physical(a + s * FourierField(b), 5);
  double worst = 0.0;
  for (size_t i = 0; i < pa.size(); ++i)
    worst = std::max(worst, std::abs(pab[i] - (pa[i] + s * pb[i])));
  CHECK(worst < 1e-12);
}

TEST_CASE("model params: critical index, window and admissibility") {
  ModelParams mp;
  mp.d = 3;
  CHECK(mp.scaling_critical() == doctest::Approx(0.5));
  CHECK(mp.regularity_gain() == doctest::Approx(1.0 / 7.0));
  mp.alpha = 0.0;
  mp.s = 0.5;
  CHECK(mp.admissible());
  mp.s = 0.5 + 1.0 / 7.0;  // right endpoint excluded
  CHECK(!mp.admissible());
  mp.s = 0.5;
  mp.alpha = 0.2;  // alpha >= s_r(3)
  CHECK(!mp.admissible());

  ModelParams mp4;
  mp4.d = 4;
  mp4.s = 1.0;
  CHECK(mp4.scaling_critical() == doctest::Approx(1.0));
  CHECK(mp4.regularity_gain() == doctest::Approx(4.0 / 19.0));
  CHECK(mp4.admissible());
  ModelParams mp5;
  mp5.d = 5;
  mp5.s = 1.5;
  CHECK(mp5.regularity_gain() == doctest::Approx(0.25));
  CHECK(mp5.admissible());
}

}  // TEST_SUITE
