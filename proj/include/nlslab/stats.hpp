#pragma once

// Small statistics kit for the Monte Carlo probes: deterministic quantiles,
// pairwise (exact-order) summation for moment merges, and least-squares
// lines with slope standard errors.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlslab {

// Pairwise summation: deterministic and accurate independent of length.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const size_t mid = x.size() / 2;
  return pairwise_sum(x.subspan(0, mid)) + pairwise_sum(x.subspan(mid));
}

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty");
  return pairwise_sum(x) / double(x.size());
}

// Linear-interpolated quantile of a copy-sorted sample, q in [0, 1].
inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile: empty");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q in [0,1]");
  std::sort(x.begin(), x.end());
  const double pos = q * double(x.size() - 1);
  const size_t lo = size_t(pos);
  if (lo + 1 >= x.size()) return x.back();
  const double frac = pos - double(lo);
  return x[lo] * (1.0 - frac) + x[lo + 1] * frac;
}

inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // standard error of the slope
  double r2 = 0.0;

  double slope_upper(double z = 2.0) const { return slope + z * slope_se; }
  double slope_lower(double z = 2.0) const { return slope - z * slope_se; }
};

// Ordinary least squares y = a + b x with the usual slope standard error.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need n >= 2");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate x");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  f.slope_se = n > 2 ? std::sqrt(ss_res / double(n - 2) / sxx) : 0.0;
  return f;
}

// Standard error of an empirical probability p from n Bernoulli trials.
inline double binomial_se(double p, double n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
}

}  // namespace nlslab
