#pragma once

// Exact linear propagator, Duhamel operator, the renormalized cubic
// nonlinearity N = N1 + N2 and the gauge transform between the plain and
// renormalized flows.
//
// Sign convention, declared once and used everywhere: e^{i t Laplacian}
// multiplies uhat(n) by e^{-i t |n|^2}, the flow of i u_t + Lap u = 0.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nlslab/field.hpp"

namespace nlslab {

// Free Schroedinger flow, exactly unitary on l^2.
inline FourierField propagate(const FourierField& u, double t) {
  FourierField out = u;
  for_each_mode(u.spec, [&](std::int64_t idx, std::span<const int> n) {
    const double phase = -t * double(sq_norm(n));
    out.coeffs[size_t(idx)] *= cplx(std::cos(phase), std::sin(phase));
  });
  return out;
}

struct NonlinearityParts {
  FourierField n1;     // rho * v1 * v2~ * v3  (pointwise product)
  FourierField n2;     // -2 rho * v1 * mean(v2~ v3)
  FourierField total;  // n1 + n2
};

// Renormalized trilinear nonlinearity. Slot 2 is conjugated by default,
// matching N(v) = N(v, conj v, v); the mean in N2 follows the configured
// convention (volume-normalized by default).
inline NonlinearityParts nonlinearity(const FourierField& v1,
                                      const FourierField& v2,
                                      const FourierField& v3, int rho,
                                      MeanConvention conv,
                                      bool conjugate_slot2 = true,
                                      int grid = 0) {
  NonlinearityParts out;
  out.n1 = triple_product(v1, conjugate_slot2, v2, v3, grid);
  out.n1 *= cplx(double(rho), 0.0);
  cplx mean;
  if (conjugate_slot2) {
    mean = mean_integral(v2, v3, conv);
  } else {
    // plain product mean: (2*pi)^{-d} Int v2 v3 dx = sum_n v2hat(n) v3hat(-n);
    // lex index of -n is count-1-index(n)
    cplx s{0.0, 0.0};
    for (size_t i = 0; i < v2.coeffs.size(); ++i)
      s += v2.coeffs[i] * v3.coeffs[v3.coeffs.size() - 1 - i];
    if (conv == MeanConvention::unnormalized) s *= torus_volume(v2.spec.d);
    mean = s;
  }
  out.n2 = v1;
  out.n2 *= cplx(-2.0 * rho, 0.0) * mean;
  out.total = out.n1 + out.n2;
  return out;
}

inline FourierField nonlinearity_total(const FourierField& v, int rho,
                                       MeanConvention conv, int grid = 0) {
  return nonlinearity(v, v, v, rho, conv, true, grid).total;
}

// Duhamel integral I(f)(t) = Int_0^t e^{i (t - t') Lap} f(t') dt' by
// trapezoidal quadrature of the interaction-picture integrand
// e^{-i t' Lap} f(t'); second order in the step, exact linear phase.
// Returns the value at every grid node; I(f)(0) = 0 by construction.
inline SpaceTimeField duhamel_all(const SpaceTimeField& f) {
  f.validate();
  SpaceTimeField out;
  out.params = f.params;
  out.times = f.times;
  out.frames.reserve(f.nodes());

  const LatticeSpec spec = f.frames.front().spec;
  FourierField acc(spec);  // running trapezoid of the twisted integrand
  FourierField prev = propagate(f.frames[0], -f.times[0]);
  out.frames.push_back(FourierField(spec));
  for (size_t k = 1; k < f.nodes(); ++k) {
    FourierField cur = propagate(f.frames[k], -f.times[k]);
    const double h = f.times[k] - f.times[k - 1];
    for (size_t i = 0; i < acc.coeffs.size(); ++i)
      acc.coeffs[i] += 0.5 * h * (prev.coeffs[i] + cur.coeffs[i]);
    out.frames.push_back(propagate(acc, f.times[k]));
    prev = std::move(cur);
  }
  return out;
}

// Single-node variant; t must be a grid node in [0, delta].
inline FourierField duhamel(const SpaceTimeField& f, double t) {
  for (size_t k = 0; k < f.times.size(); ++k) {
    if (std::abs(f.times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
      return duhamel_all(f).frames[k];
  }
  throw std::invalid_argument("duhamel: t is not a grid node of [0, delta]");
}

// Gauge rate beta(t) = 2 Int |v|^2 dx (volume-normalized by default) and its
// accumulated phase Phi(t) = Int_0^t beta, by trapezoid on the same grid.
struct GaugePhase {
  std::vector<double> times;
  std::vector<double> beta;
  std::vector<double> phi;
};

inline GaugePhase gauge_phase(const SpaceTimeField& v, MeanConvention conv) {
  GaugePhase g;
  g.times = v.times;
  g.beta.resize(v.nodes());
  g.phi.resize(v.nodes());
  for (size_t k = 0; k < v.nodes(); ++k)
    g.beta[k] = 2.0 * std::real(mean_integral(v.frames[k], v.frames[k], conv));
  g.phi[0] = 0.0;
  for (size_t k = 1; k < v.nodes(); ++k)
    g.phi[k] = g.phi[k - 1] + 0.5 * (v.times[k] - v.times[k - 1]) *
                                  (g.beta[k] + g.beta[k - 1]);
  return g;
}

enum class GaugeDirection { forward, inverse };

// forward: u(t) = e^{-i rho Phi_v(t)} v(t) maps the renormalized flow to the
// plain NLS flow; inverse multiplies by e^{+i rho Phi(t)} with Phi recomputed
// from the input's own mass. The factor is unimodular, so mass per frame is
// preserved exactly and forward/inverse invert each other.
inline SpaceTimeField gauge_transform(const SpaceTimeField& v, int rho,
                                      GaugeDirection dir) {
  v.validate();
  const GaugePhase g = gauge_phase(v, v.params.mean_convention);
  const double sign = dir == GaugeDirection::forward ? -1.0 : 1.0;
  SpaceTimeField out = v;
  for (size_t k = 0; k < v.nodes(); ++k) {
    const double ph = sign * rho * g.phi[k];
    out.frames[k] *= cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

}  // namespace nlslab
