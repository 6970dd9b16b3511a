#pragma once

// Construction of the local solution on [0, delta]:
//
//   1. v0 = linear evolution of the (randomized) data;
//   2. Picard iteration w_{k+1} = -i I(N(w_k + v0)) for the perturbation w
//      with w(0) = 0, in the renormalized (gauged) flow;
//   3. v = v0 + w, and the plain NLS solution u = gauge_transform(v) forward;
//   4. cross-validation by a classical order-4 direct integration of plain
//      NLS in the interaction picture.
//
// The contraction metric is sup-in-time H^s of successive differences, a
// computable stand-in for the atomic space norm. When the observed ratio
// stays >= 1/2 for three iterations the horizon is halved (re-gridding, same
// node count) and the iteration restarts, at most eight times.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/evolution.hpp"
#include "nlslab/field.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/random_data.hpp"

namespace nlslab {

// Frames propagate(phi, t_k) on the given grid.
inline SpaceTimeField linear_evolution(const ModelParams& params,
                                       const FourierField& phi,
                                       const std::vector<double>& times) {
  SpaceTimeField out;
  out.params = params;
  out.times = times;
  out.frames.reserve(times.size());
  for (double t : times) out.frames.push_back(propagate(phi, t));
  return out;
}

inline SpaceTimeField linear_evolution_of_data(const ModelParams& params,
                                               std::uint64_t seed,
                                               size_t node_count) {
  const RandomField rf = sample(params, seed);
  return linear_evolution(params, rf.field, uniform_times(params.delta, node_count));
}

inline double sup_time_hs_distance(const SpaceTimeField& a,
                                   const SpaceTimeField& b, double s) {
  double m = 0.0;
  for (size_t k = 0; k < a.nodes(); ++k)
    m = std::max(m, hs_norm(a.frames[k] - b.frames[k], s));
  return m;
}

inline double sup_time_l2_distance(const SpaceTimeField& a,
                                   const SpaceTimeField& b) {
  return sup_time_hs_distance(a, b, 0.0);
}

struct PicardAttempt {
  double delta = 0.0;
  int iterations = 0;
  std::vector<double> diffs;   // successive-difference norms
  std::vector<double> ratios;  // diffs[k+1] / diffs[k]
  double median_ratio = 0.0;
  bool converged = false;
};

struct PicardDiagnostics {
  int iterates = 0;
  std::vector<double> diffs;
  std::vector<double> contraction_ratios;
  double final_residual = 0.0;
  double delta_used = 0.0;
  int halvings = 0;
  std::vector<PicardAttempt> attempts;
};

struct PicardResult {
  bool ok = false;
  std::string failure;  // empty on success
  SpaceTimeField w;
  PicardDiagnostics diag;
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// One Picard sweep: w_next = -i I(N(w + v0)) on the grid of v0.
inline SpaceTimeField picard_map(const SpaceTimeField& v0,
                                 const SpaceTimeField& w) {
  const ModelParams& mp = v0.params;
  SpaceTimeField src;
  src.params = mp;
  src.times = v0.times;
  src.frames.reserve(v0.nodes());
  for (size_t k = 0; k < v0.nodes(); ++k) {
    const FourierField vk = v0.frames[k] + w.frames[k];
    src.frames.push_back(
        nonlinearity(vk, vk, vk, mp.rho, mp.mean_convention).total);
  }
  SpaceTimeField out = duhamel_all(src);
  for (auto& f : out.frames) f *= cplx(0.0, -1.0);
  return out;
}

}  // namespace detail

// Picard construction for the perturbation equation. v0 must be a linear
// evolution on a uniform grid (its t = 0 frame seeds re-gridding when the
// horizon is halved).
inline PicardResult picard_solve(const ModelParams& params,
                                 const SpaceTimeField& v0_in, double tol = 1e-8,
                                 int max_iter = 25) {
  if (tol <= 0.0) throw std::invalid_argument("picard_solve: tol > 0");
  v0_in.validate();
  constexpr int kMaxHalvings = 8;
  constexpr double kRatioThreshold = 0.5;
  constexpr int kBadStreak = 3;

  PicardResult res;
  SpaceTimeField v0 = v0_in;
  double delta = v0.times.back();
  ModelParams mp = params;

  for (int attempt_idx = 0; attempt_idx <= kMaxHalvings; ++attempt_idx) {
    PicardAttempt attempt;
    attempt.delta = delta;

    SpaceTimeField w;
    w.params = mp;
    w.times = v0.times;
    w.frames.assign(v0.nodes(), FourierField(v0.frames.front().spec));

    int bad_streak = 0;
    bool restart = false;
    for (int it = 0; it < max_iter; ++it) {
      SpaceTimeField w_next = detail::picard_map(v0, w);
      const double diff = sup_time_hs_distance(w_next, w, mp.s);
      ++attempt.iterations;
      attempt.diffs.push_back(diff);
      if (attempt.diffs.size() >= 2) {
        const double prev = attempt.diffs[attempt.diffs.size() - 2];
        const double ratio = prev > 0.0 ? diff / prev : 0.0;
        attempt.ratios.push_back(ratio);
        if (ratio >= kRatioThreshold) {
          if (++bad_streak >= kBadStreak) {
            restart = true;
          }
        } else {
          bad_streak = 0;
        }
      }
      w = std::move(w_next);
      if (diff < tol) {
        attempt.converged = true;
        break;
      }
      if (restart) break;
      if (!std::isfinite(diff)) {
        restart = true;
        break;
      }
    }
    attempt.median_ratio = detail::median_of(attempt.ratios);
    res.diag.attempts.push_back(attempt);
    res.diag.iterates += attempt.iterations;

    if (attempt.converged) {
      // non-increasing reported ratio across restarts, else the run is
      // reported failed even though this attempt converged
      for (size_t a = 1; a < res.diag.attempts.size(); ++a) {
        if (res.diag.attempts[a].median_ratio >
            res.diag.attempts[a - 1].median_ratio + 1e-12) {
          res.failure = "contraction ratio failed to improve under halving";
          res.diag.delta_used = delta;
          res.w = std::move(w);
          return res;
        }
      }
      res.ok = true;
      res.w = std::move(w);
      res.diag.delta_used = delta;
      res.diag.diffs = attempt.diffs;
      res.diag.contraction_ratios = attempt.ratios;
      res.diag.halvings = attempt_idx;
      // fixed-point residual: sup-in-time H^s of w - Phi(w)
      const SpaceTimeField phi_w = detail::picard_map(v0, res.w);
      res.diag.final_residual = sup_time_hs_distance(res.w, phi_w, mp.s);
      return res;
    }

    if (attempt_idx == kMaxHalvings) break;
    // halve the horizon and re-grid from the t = 0 data frame
    delta *= 0.5;
    mp.delta = delta;
    v0 = linear_evolution(mp, v0.frames.front(),
                          uniform_times(delta, v0.nodes()));
  }

  res.failure = "no contraction after 8 horizon halvings";
  res.diag.delta_used = delta;
  return res;
}

struct DirectResult {
  bool ok = false;
  std::string failure;
  SpaceTimeField u;
  double mass_drift = 0.0;  // max relative L^2 deviation from the data
};

// Classical RK4 for plain NLS i u_t + Lap u = rho |u|^2 u in the interaction
// picture: the twisted variable a(t) = e^{-i t Lap} u(t) carries the exact
// linear phase, RK4 integrates a' = -i e^{-i t Lap} (rho |u|^2 u). substeps
// subdivides each grid interval internally; output frames sit on the grid.
inline DirectResult direct_step_solve(const ModelParams& params,
                                      const FourierField& phi,
                                      const std::vector<double>& times,
                                      int substeps = 1) {
  DirectResult res;
  res.u.params = params;
  res.u.times = times;
  res.u.frames.reserve(times.size());

  const auto rhs = [&](double t, const FourierField& a) {
    const FourierField u = propagate(a, t);
    FourierField f = triple_product(u, true, u, u);
    f *= cplx(0.0, -double(params.rho));
    return propagate(f, -t);
  };

  FourierField a = phi;
  res.u.frames.push_back(phi);
  const double mass0 = phi.l2_norm();
  for (size_t k = 1; k < times.size(); ++k) {
    const double h = (times[k] - times[k - 1]) / double(substeps);
    double t = times[k - 1];
    for (int s = 0; s < substeps; ++s) {
      const double before = a.l2_norm();
      const FourierField k1 = rhs(t, a);
      const FourierField k2 = rhs(t + 0.5 * h, a + cplx(0.5 * h, 0.0) * k1);
      const FourierField k3 = rhs(t + 0.5 * h, a + cplx(0.5 * h, 0.0) * k2);
      const FourierField k4 = rhs(t + h, a + cplx(h, 0.0) * k3);
      for (size_t i = 0; i < a.coeffs.size(); ++i)
        a.coeffs[i] += (h / 6.0) * (k1.coeffs[i] + 2.0 * k2.coeffs[i] +
                                    2.0 * k3.coeffs[i] + k4.coeffs[i]);
      t += h;
      const double after = a.l2_norm();
      if (!std::isfinite(after) || (before > 0.0 && after > 10.0 * before)) {
        res.failure = "direct stepper unstable: norm grew >10x in one step";
        return res;
      }
    }
    res.u.frames.push_back(propagate(a, times[k]));
    if (mass0 > 0.0) {
      const double m = res.u.frames.back().l2_norm();
      res.mass_drift = std::max(res.mass_drift, std::abs(m - mass0) / mass0);
    }
  }
  res.ok = true;
  return res;
}

// Full pipeline for one draw: Picard in the gauged flow, ungauge, and
// cross-validate against the direct stepper on the same grid.
struct SolveReport {
  std::uint64_t seed = 0;
  PicardResult picard;
  SpaceTimeField v;         // v0 + w on the final grid
  SpaceTimeField u_picard;  // ungauged
  DirectResult direct;
  double picard_vs_direct_l2 = 0.0;  // sup-in-time L^2 distance
  double plain_residual = 0.0;       // Duhamel-form defect of u_picard
};

// Discrete defect of plain NLS in Duhamel form, measured with the same
// trapezoid family: the L^2-in-time norm of
// u(t) - [S(t) u(0) - i rho I(|u|^2 u)(t)], relative to the L^2-in-time norm
// of u itself. The relative form makes the threshold grid- and
// normalization-independent.
inline double plain_nls_residual(const SpaceTimeField& u) {
  SpaceTimeField src;
  src.params = u.params;
  src.times = u.times;
  src.frames.reserve(u.nodes());
  for (const auto& f : u.frames) {
    FourierField g = triple_product(f, true, f, f);
    g *= cplx(double(u.params.rho), 0.0);
    src.frames.push_back(std::move(g));
  }
  const SpaceTimeField integral = duhamel_all(src);
  double defect2 = 0.0, scale2 = 0.0;
  std::vector<double> dk(u.nodes()), sk(u.nodes());
  for (size_t k = 0; k < u.nodes(); ++k) {
    FourierField expect = propagate(u.frames.front(), u.times[k]);
    expect -= cplx(0.0, 1.0) * integral.frames[k];
    dk[k] = std::pow(hs_norm(u.frames[k] - expect, 0.0), 2);
    sk[k] = std::pow(hs_norm(u.frames[k], 0.0), 2);
  }
  for (size_t k = 0; k + 1 < u.nodes(); ++k) {
    const double h = 0.5 * (u.times[k + 1] - u.times[k]);
    defect2 += h * (dk[k] + dk[k + 1]);
    scale2 += h * (sk[k] + sk[k + 1]);
  }
  return scale2 > 0.0 ? std::sqrt(defect2 / scale2) : std::sqrt(defect2);
}

inline SolveReport solve_pipeline(const ModelParams& params, std::uint64_t seed,
                                  size_t node_count, double tol = 1e-8,
                                  int max_iter = 25, int direct_substeps = 1) {
  SolveReport rep;
  rep.seed = seed;
  const RandomField rf = sample(params, seed);
  const SpaceTimeField v0 =
      linear_evolution(params, rf.field, uniform_times(params.delta, node_count));
  rep.picard = picard_solve(params, v0, tol, max_iter);
  if (!rep.picard.ok) return rep;

  // assemble v on the grid the solver settled on
  ModelParams mp = params;
  mp.delta = rep.picard.diag.delta_used;
  const SpaceTimeField v0_final =
      linear_evolution(mp, rf.field, rep.picard.w.times);
  rep.v = v0_final;
  for (size_t k = 0; k < rep.v.nodes(); ++k)
    rep.v.frames[k] += rep.picard.w.frames[k];
  rep.u_picard = gauge_transform(rep.v, mp.rho, GaugeDirection::forward);

  rep.direct = direct_step_solve(mp, rf.field, rep.v.times, direct_substeps);
  if (rep.direct.ok)
    rep.picard_vs_direct_l2 = sup_time_l2_distance(rep.u_picard, rep.direct.u);
  rep.plain_residual = plain_nls_residual(rep.u_picard);
  return rep;
}

}  // namespace nlslab
