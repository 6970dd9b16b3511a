#pragma once

// Exact lattice enumeration: representations as sums of squares, sphere and
// ball-plane sections, bilinear level sets, resonance triples, the indicator
// Fourier coefficient formula and the AA* operator-norm bound.
//
// Every count is an exact integer. Enumerations whose cost estimate exceeds
// the budget refuse with BudgetExceeded rather than truncate. Inequality
// comparisons against the analytic bounds carry fitted constants -- the
// bounds hold up to unspecified constants, so the artifact fits and reports
// them instead of asserting constant 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlslab/lattice.hpp"

namespace nlslab {

struct BudgetExceeded : std::runtime_error {
  double estimated_cost;
  explicit BudgetExceeded(const std::string& what, double cost)
      : std::runtime_error(what + " (estimated cost " + std::to_string(cost) +
                           " elementary steps)"),
        estimated_cost(cost) {}
};

inline constexpr double kEnumerationBudget = 3e8;  // elementary steps

// r_d(A): number of (X_1, ..., X_d) in Z^d with X_1^2 + ... + X_d^2 = A.
inline std::int64_t count_sum_of_squares(int d, std::int64_t A) {
  if (A < 0) throw std::invalid_argument("count_sum_of_squares: A >= 0");
  if (d == 0) return A == 0 ? 1 : 0;
  if (d == 1) {
    const auto r = std::int64_t(std::llround(std::sqrt(double(A))));
    for (std::int64_t x : {r - 1, r, r + 1})
      if (x >= 0 && x * x == A) return x == 0 ? 1 : 2;
    return 0;
  }
  const auto rmax = std::int64_t(std::sqrt(double(A))) + 1;
  if (std::pow(double(2 * rmax + 1), d - 1) > kEnumerationBudget)
    throw BudgetExceeded("count_sum_of_squares", std::pow(double(2 * rmax + 1), d - 1));
  std::int64_t total = 0;
  for (std::int64_t x = -rmax; x <= rmax; ++x) {
    const std::int64_t rem = A - x * x;
    if (rem < 0) continue;
    total += count_sum_of_squares(d - 1, rem);
  }
  return total;
}

// |Z^d intersect S_R| with R^2 = A (integer); exactly r_d(A).
inline std::int64_t count_sphere(int d, std::int64_t A) {
  return count_sum_of_squares(d, A);
}

// Plane <normal, x> = offset (integer data; rational inputs premultiplied).
struct PlaneSpec {
  std::vector<std::int64_t> normal;
  std::int64_t offset = 0;
};

// |Z^d intersect B_r intersect P| by enumeration of the bounding box.
inline std::int64_t count_ball_plane(int d, double r, const PlaneSpec& plane) {
  if (std::ssize(plane.normal) != d)
    throw std::invalid_argument("count_ball_plane: normal dimension mismatch");
  if (r < 0.0) throw std::invalid_argument("count_ball_plane: r >= 0");
  const auto rmax = std::int64_t(std::floor(r));
  const double box = std::pow(double(2 * rmax + 1), d);
  if (box > kEnumerationBudget) throw BudgetExceeded("count_ball_plane", box);
  const double r2 = r * r;
  std::int64_t count = 0;
  std::vector<std::int64_t> x(size_t(d), -rmax);
  if (rmax < 0) return 0;
  while (true) {
    double nn = 0.0;
    std::int64_t dot = 0;
    for (int i = 0; i < d; ++i) {
      nn += double(x[size_t(i)]) * double(x[size_t(i)]);
      dot += plane.normal[size_t(i)] * x[size_t(i)];
    }
    if (nn <= r2 && dot == plane.offset) ++count;
    int i = d - 1;
    for (; i >= 0; --i) {
      if (x[size_t(i)] < rmax) {
        ++x[size_t(i)];
        break;
      }
      x[size_t(i)] = -rmax;
    }
    if (i < 0) break;
  }
  return count;
}

namespace detail {

// Visits all modes of the dyadic block N (sup-norm annulus) in dimension d.
template <class F>
void for_each_block_mode(int d, int N, F&& f) {
  const LatticeSpec spec(d, N);
  for_each_mode(spec, [&](std::int64_t, std::span<const int> n) {
    if (dyadic_block_of(n) == N) f(n);
  });
}

inline double block_size(int d, int N) {
  const double full = std::pow(2.0 * N + 1.0, d);
  const double inner = N == 1 ? 0.0 : std::pow(double(N) + 1.0, d);
  return full - inner;
}

}  // namespace detail

struct BilinearLevelSetResult {
  std::int64_t cardinality = 0;
  double bound_kernel = 0.0;  // N1^{d-1} N3^{d-1} min(N1,N3)^epsilon
  double fitted_constant = 0.0;  // cardinality / bound_kernel
};

// |S(n2)| = #{(n1, n3): n1 in block N1, n3 in block N3, n2 != n1, n2 != n3,
//            <n2 - n1, n2 - n3> = mu}.
// Enumerates n1 and walks the hyperplane in n3 via a pivot coordinate.
inline BilinearLevelSetResult count_bilinear_level_set(
    int d, std::span<const int> n2, std::int64_t mu, int N1, int N3,
    double epsilon = 0.1) {
  if (std::ssize(n2) != d)
    throw std::invalid_argument("count_bilinear_level_set: n2 dimension");
  const double cost =
      detail::block_size(d, N1) * std::pow(2.0 * N3 + 1.0, d - 1);
  if (cost > kEnumerationBudget)
    throw BudgetExceeded("count_bilinear_level_set", cost);

  std::int64_t count = 0;
  detail::for_each_block_mode(d, N1, [&](std::span<const int> n1) {
    std::vector<std::int64_t> v(size_t(d), 0);
    bool zero = true;
    int pivot = -1;
    for (int i = 0; i < d; ++i) {
      v[size_t(i)] = std::int64_t(n2[size_t(i)]) - n1[size_t(i)];
      if (v[size_t(i)] != 0) {
        zero = false;
        pivot = i;
      }
    }
    if (zero) return;  // n1 = n2 excluded
    // y = n2 - n3, y_i in [n2_i - N3, n2_i + N3]; solve the pivot coordinate
    std::vector<std::int64_t> y(size_t(d), 0);
    std::vector<int> free_axes;
    for (int i = 0; i < d; ++i)
      if (i != pivot) free_axes.push_back(i);
    std::vector<std::int64_t> lo(size_t(d), 0), hi(size_t(d), 0);
    for (int i = 0; i < d; ++i) {
      lo[size_t(i)] = std::int64_t(n2[size_t(i)]) - N3;
      hi[size_t(i)] = std::int64_t(n2[size_t(i)]) + N3;
    }
    for (int i : free_axes) y[size_t(i)] = lo[size_t(i)];
    while (true) {
      std::int64_t partial = 0;
      for (int i : free_axes) partial += v[size_t(i)] * y[size_t(i)];
      const std::int64_t num = mu - partial;
      if (num % v[size_t(pivot)] == 0) {
        const std::int64_t yp = num / v[size_t(pivot)];
        if (yp >= lo[size_t(pivot)] && yp <= hi[size_t(pivot)]) {
          y[size_t(pivot)] = yp;
          std::vector<int> n3(size_t(d), 0);
          bool same = true;
          for (int i = 0; i < d; ++i) {
            n3[size_t(i)] = int(std::int64_t(n2[size_t(i)]) - y[size_t(i)]);
            if (n3[size_t(i)] != n2[size_t(i)]) same = false;
          }
          if (!same && dyadic_block_of(std::span<const int>(n3)) == N3) ++count;
        }
      }
      size_t ai = free_axes.size();
      while (ai > 0) {
        const int axis = free_axes[ai - 1];
        if (y[size_t(axis)] < hi[size_t(axis)]) {
          ++y[size_t(axis)];
          break;
        }
        y[size_t(axis)] = lo[size_t(axis)];
        --ai;
      }
      if (ai == 0) break;
    }
  });

  BilinearLevelSetResult res;
  res.cardinality = count;
  res.bound_kernel = std::pow(double(N1), d - 1.0) * std::pow(double(N3), d - 1.0) *
                     std::pow(double(std::min(N1, N3)), epsilon);
  res.fitted_constant = double(count) / res.bound_kernel;
  return res;
}

// Which slot of the trilinear term carries the conjugate; the resonance
// equations flip sign on that slot.
enum class ConjugationSlot { slot1, slot2, slot3 };

struct ResonanceTriple {
  std::vector<int> n1, n2, n3;
};

// Exact solution list of
//   (+-) n1 (+-) n2 (+-) n3 = n,  (+-)|n1|^2 (+-)|n2|^2 (+-)|n3|^2 = m,
// sign - on the conjugated slot, with the conjugated slot's frequency
// distinct from the other two, and n_i in block N_i.
inline std::vector<ResonanceTriple> resonance_set(
    int d, std::span<const int> n, std::int64_t m, int N1, int N2, int N3,
    ConjugationSlot conj = ConjugationSlot::slot2) {
  if (std::ssize(n) != d) throw std::invalid_argument("resonance_set: n dimension");
  const double cost = detail::block_size(d, N1) * detail::block_size(d, N2);
  if (cost > kEnumerationBudget) throw BudgetExceeded("resonance_set", cost);

  const int s1 = conj == ConjugationSlot::slot1 ? -1 : 1;
  const int s2 = conj == ConjugationSlot::slot2 ? -1 : 1;
  const int s3 = conj == ConjugationSlot::slot3 ? -1 : 1;

  std::vector<ResonanceTriple> out;
  detail::for_each_block_mode(d, N1, [&](std::span<const int> n1) {
    detail::for_each_block_mode(d, N2, [&](std::span<const int> n2) {
      // solve s1 n1 + s2 n2 + s3 n3 = n for n3
      std::vector<int> n3(size_t(d), 0);
      for (int i = 0; i < d; ++i) {
        const std::int64_t v = (std::int64_t(n[size_t(i)]) -
                                s1 * std::int64_t(n1[size_t(i)]) -
                                s2 * std::int64_t(n2[size_t(i)])) *
                               s3;
        n3[size_t(i)] = int(v);
      }
      if (dyadic_block_of(std::span<const int>(n3)) != N3) return;
      const std::int64_t q = s1 * sq_norm(n1) + s2 * sq_norm(n2) +
                             s3 * sq_norm(std::span<const int>(n3));
      if (q != m) return;
      // distinctness: the conjugated-slot frequency differs from the others
      const auto eq = [d](std::span<const int> a, std::span<const int> b) {
        for (int i = 0; i < d; ++i)
          if (a[size_t(i)] != b[size_t(i)]) return false;
        return true;
      };
      const std::span<const int> v3(n3);
      bool admissible = true;
      switch (conj) {
        case ConjugationSlot::slot1:
          admissible = !eq(n1, n2) && !eq(n1, v3);
          break;
        case ConjugationSlot::slot2:
          admissible = !eq(n2, n1) && !eq(n2, v3);
          break;
        case ConjugationSlot::slot3:
          admissible = !eq(v3, n1) && !eq(v3, n2);
          break;
      }
      if (!admissible) return;
      ResonanceTriple t;
      t.n1.assign(n1.begin(), n1.end());
      t.n2.assign(n2.begin(), n2.end());
      t.n3 = n3;
      out.push_back(std::move(t));
    });
  });
  return out;
}

// F(1_{[a,b]})(k) = (e^{ikb} - e^{ika}) / (ik) for k != 0, b - a at k = 0;
// |F(k)| <= 2/|k| for all k != 0.
inline std::complex<double> indicator_fourier_coeff(double a, double b, int k) {
  if (!(0.0 <= a && a <= b && b <= 2.0 * std::numbers::pi))
    throw std::invalid_argument("indicator_fourier_coeff: need 0 <= a <= b <= 2pi");
  if (k == 0) return {b - a, 0.0};
  const std::complex<double> ik(0.0, double(k));
  return (std::exp(ik * b) - std::exp(ik * a)) / ik;
}

struct MatrixBoundResult {
  bool ok = false;
  double bound = 0.0;  // max_j sum_k |A_jk|^2 + (sum_{i != j} |row_i . row_j|^2)^{1/2}
  double exact = 0.0;  // spectral 2-norm of A A^* by power iteration
  int iterations = 0;
};

// Row-major N x M complex matrix.
inline MatrixBoundResult matrix_aat_bound(std::span<const std::complex<double>> A,
                                          int N, int M) {
  if (std::ssize(A) != std::int64_t(N) * M)
    throw std::invalid_argument("matrix_aat_bound: size mismatch");
  MatrixBoundResult res;

  // Gram matrix B = A A^*
  std::vector<std::complex<double>> B(size_t(N) * size_t(N));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      std::complex<double> s{0.0, 0.0};
      for (int k = 0; k < M; ++k)
        s += A[size_t(i) * M + k] * std::conj(A[size_t(j) * M + k]);
      B[size_t(i) * N + j] = s;
    }

  double max_diag = 0.0, off = 0.0;
  for (int i = 0; i < N; ++i) {
    max_diag = std::max(max_diag, std::real(B[size_t(i) * N + i]));
    for (int j = 0; j < N; ++j)
      if (i != j) off += std::norm(B[size_t(i) * N + j]);
  }
  res.bound = max_diag + std::sqrt(off);

  // power iteration on the Hermitian PSD matrix B
  std::vector<std::complex<double>> v(size_t(N), {0.0, 0.0}), w(size_t(N), {0.0, 0.0});
  for (int i = 0; i < N; ++i)
    v[size_t(i)] = {1.0 + double(i % 7), 0.5 * double(i % 3)};
  double lambda = 0.0;
  const int max_steps = 100000;
  for (int step = 0; step < max_steps; ++step) {
    double nv = 0.0;
    for (const auto& z : v) nv += std::norm(z);
    nv = std::sqrt(nv);
    if (nv == 0.0) {  // zero matrix
      res.ok = true;
      res.exact = 0.0;
      return res;
    }
    for (auto& z : v) z /= nv;
    for (int i = 0; i < N; ++i) {
      std::complex<double> s{0.0, 0.0};
      for (int j = 0; j < N; ++j) s += B[size_t(i) * N + j] * v[size_t(j)];
      w[size_t(i)] = s;
    }
    double rayleigh = 0.0;
    for (int i = 0; i < N; ++i)
      rayleigh += std::real(std::conj(v[size_t(i)]) * w[size_t(i)]);
    res.iterations = step + 1;
    if (step > 0 && std::abs(rayleigh - lambda) <= 1e-10 * std::max(1.0, rayleigh)) {
      res.exact = rayleigh;
      res.ok = true;
      return res;
    }
    lambda = rayleigh;
    std::swap(v, w);
  }
  res.exact = lambda;
  res.ok = false;  // did not converge in 1e5 steps
  return res;
}

}  // namespace nlslab
