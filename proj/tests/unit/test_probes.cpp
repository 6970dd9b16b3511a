#include <doctest.h>

#include <cmath>

#include "nlslab/probes.hpp"

using namespace nlslab;

TEST_SUITE("probes") {

TEST_CASE("coefficient growth: monotone exclusions, stable C, mode-0 tail") {
  CoeffGrowthConfig cfg;
  cfg.d = 3;
  cfg.M = 4;
  cfg.samples = 3000;
  cfg.seed = 11;
  cfg.threads = 2;
  const ProbeReport rep = probe_coefficient_growth(cfg);
  CHECK(rep.pass);
  CHECK(rep.metrics.at("exclusion_monotone").get<bool>());
  CHECK(rep.metrics.at("split_sample_deviation").get<double>() <= 0.2);
  // reproducible bit-identically from the same config
  const ProbeReport rep2 = probe_coefficient_growth(cfg);
  CHECK(rep.metrics.dump() == rep2.metrics.dump());
  CHECK_THROWS_AS(
      (void)probe_coefficient_growth([] {
        CoeffGrowthConfig c;
        c.samples = 10;
        return c;
      }()),
      std::invalid_argument);
}

TEST_CASE("linear chaos: analytic tail, moments, scale equivariance") {
  LinearChaosConfig cfg;
  cfg.coeffs = {cplx{1.0, 0.0}};  // standard complex Gaussian
  cfg.samples = 30000;
  cfg.seed = 12;
  cfg.threads = 2;
  const ProbeReport rep = probe_linear_chaos_tail(cfg);
  CHECK(rep.pass);
  // P(|F| > 1) ~ e^{-1} within 3 standard errors
  const auto tails = rep.metrics.at("tails");
  CHECK(std::abs(tails[0].at("empirical").get<double>() - std::exp(-1.0)) <=
        3.0 * tails[0].at("se").get<double>());

  // scaling invariance: the report of 7c is identical (tails are measured in
  // units of sigma, which scales out exactly)
  LinearChaosConfig scaled = cfg;
  scaled.coeffs = {cplx{7.0, 0.0}};
  const ProbeReport rep7 = probe_linear_chaos_tail(scaled);
  CHECK(rep.metrics.at("fitted_C").get<double>() ==
        doctest::Approx(rep7.metrics.at("fitted_C").get<double>())
            .epsilon(1e-12));

  LinearChaosConfig zero;
  zero.coeffs = {cplx{0.0, 0.0}};
  CHECK_THROWS_AS((void)probe_linear_chaos_tail(zero), std::invalid_argument);
}

TEST_CASE("random lp decay: slope below the dispersive threshold") {
  RandomLpDecayConfig cfg;
  cfg.d = 3;
  cfg.alpha = 0.0;
  cfg.N_ladder = {2, 4, 8};
  cfg.samples = 60;
  cfg.seed = 13;
  cfg.time_nodes = 7;
  cfg.threads = 2;
  const ProbeReport rep = probe_random_lp_decay(cfg);
  CHECK(rep.pass);  // slope_upper <= -0.35
  CHECK(rep.metrics.at("slope").get<double>() < 0.0);
}

TEST_CASE("random lp decay: degenerate alpha = s_c flattens the slope") {
  RandomLpDecayConfig cfg;
  cfg.d = 3;
  cfg.alpha = 0.5;  // = s_c(3): the weight cancels the bracket decay
  cfg.N_ladder = {2, 4, 8};
  cfg.samples = 60;
  cfg.seed = 14;
  cfg.time_nodes = 7;
  cfg.threads = 2;
  const ProbeReport rep = probe_random_lp_decay(cfg);
  const double slope = rep.metrics.at("slope").get<double>();
  CHECK(std::abs(slope) <= 0.15);
  CHECK(rep.pass);  // threshold is -(s_c - alpha) + 0.15 = +0.15
}

TEST_CASE("random lp decay: halving delta never increases the norms") {
  RandomLpDecayConfig cfg;
  cfg.d = 2;
  cfg.N_ladder = {2, 4};
  cfg.samples = 10;
  cfg.seed = 15;
  cfg.time_nodes = 9;
  const ProbeReport full = probe_random_lp_decay(cfg);
  RandomLpDecayConfig half = cfg;
  half.delta = cfg.delta / 2.0;
  const ProbeReport halved = probe_random_lp_decay(half);
  // same draws, shorter time interval: per-N medians cannot grow
  for (size_t i = 0; i < cfg.N_ladder.size(); ++i) {
    const double a = full.metrics.at("per_N")[i].at("median").get<double>();
    const double b = halved.metrics.at("per_N")[i].at("median").get<double>();
    CHECK(b <= a * (1.0 + 1e-12));
  }
}

TEST_CASE("trilinear chaos: single-triple moments and 2/3-type exponent") {
  TrilinearChaosConfig cfg;
  cfg.d = 2;
  cfg.triples = {{{1, 0}, {0, 1}, {-1, 0}, cplx{1.0, 0.0}}};
  cfg.samples = 50000;
  cfg.seed = 16;
  cfg.threads = 2;
  const ProbeReport rep = probe_trilinear_chaos_tail(cfg);
  // E|F|^2 = 1 by independence; Var |F|^2 = E|g|^4^3 - 1 = 7
  const double mean_sq = rep.metrics.at("mean_abs_sq").get<double>();
  CHECK(std::abs(mean_sq - 1.0) <= 3.0 * std::sqrt(7.0 / double(cfg.samples)));
  const double expo = rep.metrics.at("exponent").get<double>();
  CHECK(expo >= 0.55);
  CHECK(expo <= 0.8);
  CHECK(rep.pass);
}

TEST_CASE("trilinear chaos: degenerate and invalid index sets") {
  TrilinearChaosConfig cfg;
  cfg.d = 2;
  cfg.triples = {{{1, 0}, {0, 1}, {-1, 0}, cplx{0.0, 0.0}}};
  const ProbeReport rep = probe_trilinear_chaos_tail(cfg);
  CHECK(rep.metrics.at("degenerate").get<bool>());
  CHECK(rep.pass);

  TrilinearChaosConfig bad;
  bad.d = 2;
  bad.triples = {{{1, 0}, {1, 0}, {0, 1}, cplx{1.0, 0.0}}};  // n1 = n2
  CHECK_THROWS_AS((void)probe_trilinear_chaos_tail(bad), std::invalid_argument);
}

TEST_CASE("tail exponent fitter discriminates linear from cubic chaos") {
  std::vector<double> linear(60000);
  for (size_t i = 0; i < linear.size(); ++i)
    linear[i] = std::abs(rng::complex_gaussian(17ULL, i));
  const TailExponentFit f = fit_tail_exponent(linear, 0.75, 0.995, 12);
  CHECK(f.fit.slope >= 1.6);
  CHECK(f.fit.slope <= 2.4);  // cleanly separated from 2/3
}

TEST_CASE("strichartz scaling: single-mode data scale flat") {
  // |e^{i(n.x - |n|^2 t)}| = 1, so the L^p norm is N-independent
  std::vector<double> norms;
  for (int N : {2, 4, 8}) {
    ModelParams mp;
    mp.d = 3;
    mp.M = N;
    mp.delta = 1.0;
    FourierField phi(mp.lattice());
    std::vector<int> n{N, 0, 0};
    phi.at(std::span<const int>(n)) = cplx(1.0, 0.0);
    phi *= cplx(1.0 / phi.l2_norm(), 0.0);
    const SpaceTimeField fe = linear_evolution(mp, phi, uniform_times(1.0, 5));
    norms.push_back(lp_lq_norm(fe, 4.0, 4.0));
  }
  CHECK(norms[1] == doctest::Approx(norms[0]).epsilon(1e-9));
  CHECK(norms[2] == doctest::Approx(norms[0]).epsilon(1e-9));
}

TEST_CASE("strichartz scaling: separable evaluation matches the generic path") {
  // corner-cube extremal on block N=2, d=2: both evaluation routes must agree
  const int N = 2, d = 2;
  ModelParams mp;
  mp.d = d;
  mp.M = N;
  mp.delta = 1.0;
  FourierField phi(mp.lattice());
  for_each_mode(phi.spec, [&](std::int64_t idx, std::span<const int> n) {
    bool corner = true;
    for (int i = 0; i < d; ++i)
      if (!(n[i] > N / 2 && n[i] <= N)) corner = false;
    if (corner) phi.coeffs[size_t(idx)] = 1.0;
  });
  phi *= cplx(1.0 / phi.l2_norm(), 0.0);
  const size_t t_nodes = 129;
  const SpaceTimeField fe =
      linear_evolution(mp, phi, uniform_times(1.0, t_nodes));
  const double generic = lp_lq_norm(fe, 4.0, 4.0);

  std::vector<std::vector<cplx>> axes(
      size_t(d), std::vector<cplx>(size_t(2 * N + 1), cplx{0.0, 0.0}));
  for (int i = 0; i < d; ++i)
    for (int k = -N; k <= N; ++k)
      if (k > N / 2 && k <= N) axes[size_t(i)][size_t(k + N)] = 1.0;
  for (auto& c : axes) {
    double s2 = 0.0;
    for (const cplx& z : c) s2 += std::norm(z);
    for (cplx& z : c) z *= 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);
  }
  const double separable = detail::separable_lp_norm(axes, N, 4.0, t_nodes);
  CHECK(separable == doctest::Approx(generic).epsilon(1e-9));
}

TEST_CASE("strichartz scaling: slope bound holds on a small ladder") {
  StrichartzConfig cfg;
  cfg.d = 3;
  cfg.p = 4.0;
  cfg.N_ladder = {2, 4, 8};
  cfg.trials = 8;
  cfg.seed = 18;
  cfg.time_nodes = 17;
  cfg.threads = 2;
  const ProbeReport rep = probe_strichartz_scaling(cfg);
  CHECK(rep.metrics.at("slope").get<double>() <
        rep.metrics.at("threshold").get<double>());

  StrichartzConfig cfg4 = cfg;
  cfg4.d = 4;
  cfg4.family = StrichartzFamily::separable;
  cfg4.N_ladder = {2, 4, 8};
  cfg4.separable_time_nodes = 129;
  const ProbeReport rep4 = probe_strichartz_scaling(cfg4);
  CHECK(rep4.metrics.at("slope").get<double>() <
        rep4.metrics.at("threshold").get<double>());
}

TEST_CASE("strichartz scaling refuses sub-critical p") {
  StrichartzConfig cfg;
  cfg.d = 3;
  cfg.p = 3.0;  // p_c(3) = 10/3
  CHECK_THROWS_AS((void)probe_strichartz_scaling(cfg), std::invalid_argument);
}

TEST_CASE("trilinear estimate: incomparable frequencies vanish exactly") {
  CHECK(trilinear_pairing_vanishes(2, 16, 2, 2));
  CHECK(!trilinear_pairing_vanishes(16, 16, 2, 2));
  CHECK(trilinear_pairing_vanishes(32, 2, 2, 2));

  TrilinearEstimateConfig cfg;
  cfg.case_tag = "Ba";
  cfg.N1_ladder = {16};
  cfg.N0 = 2;
  cfg.samples = 5;
  const ProbeReport rep = probe_trilinear_estimate(cfg);
  CHECK(rep.metrics.at("per_N1")[0].at("exact_zero").get<bool>());
  CHECK(rep.metrics.at("per_N1")[0].at("median").get<double>() == 0.0);
}

TEST_CASE("trilinear estimate: case Ba medians decay on a small ladder") {
  TrilinearEstimateConfig cfg;
  cfg.case_tag = "Ba";
  cfg.N1_ladder = {4, 8};
  cfg.N2 = 2;
  cfg.N3 = 2;
  cfg.samples = 40;
  cfg.seed = 19;
  cfg.time_nodes = 9;
  cfg.threads = 2;
  const ProbeReport rep = probe_trilinear_estimate(cfg);
  const double m4 = rep.metrics.at("per_N1")[0].at("median").get<double>();
  const double m8 = rep.metrics.at("per_N1")[1].at("median").get<double>();
  CHECK(m4 > 0.0);
  CHECK(m8 <= m4 * 1.01);
  CHECK(rep.metrics.at("medians_nonincreasing").get<bool>());

  TrilinearEstimateConfig bad = cfg;
  bad.case_tag = "Zz";
  CHECK_THROWS_AS((void)probe_trilinear_estimate(bad), std::invalid_argument);
}

TEST_CASE("gauge and solution campaign: small smoke run") {
  GaugeSolutionConfig cfg;
  cfg.params.d = 3;
  cfg.params.M = 4;
  cfg.params.alpha = 0.0;
  cfg.params.s = cfg.params.scaling_critical();
  cfg.params.delta = 0.01;
  cfg.seeds = 2;
  cfg.seed0 = 20;
  cfg.node_count = 101;
  cfg.agree_tol = 1e-4;
  cfg.threads = 2;
  const ProbeReport rep = probe_gauge_and_solution(cfg);
  CHECK(rep.metrics.at("failure_fraction").get<double>() == 0.0);
  CHECK(rep.metrics.at("worst_agreement_l2").get<double>() < 1e-4);
  CHECK(rep.pass);
}

}  // TEST_SUITE
