#pragma once

// Thin wrapper over FFTW3: cached unaligned in-place c2c plans so transforms
// of the same shape reuse a plan from any thread. fftw_execute_dft is
// thread-safe; plan creation is serialized by a mutex.

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlslab {

// Smallest size >= n whose factors are all in {2, 3, 5, 7}.
inline int next_fast_size(int n) {
  if (n < 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const std::vector<int>& dims, int sign) {
    std::scoped_lock lock(mu_);
    auto key = std::make_pair(dims, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::int64_t total = 1;
    for (int d : dims) total *= d;
    // Plan on scratch storage; FFTW_UNALIGNED keeps the plan valid for the
    // caller's buffers via the new-array execute interface. MEASURE pays a
    // one-time planning cost per shape, amortized over many executions.
    std::vector<std::complex<double>> scratch(total);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft(int(dims.size()), dims.data(), p, p, sign,
                                   FFTW_MEASURE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw_plan_dft failed");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mu_;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

}  // namespace detail

// In-place unnormalized DFT, sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1).
// BACKWARD computes sum_k X(k) e^{+2*pi*i*j*k/G} per axis, matching the
// evaluation of a Fourier series on the uniform grid x_j = 2*pi*j/G.
inline void fft_inplace(std::span<std::complex<double>> data,
                        const std::vector<int>& dims, int sign) {
  std::int64_t total = 1;
  for (int d : dims) total *= d;
  if (std::ssize(data) != total)
    throw std::invalid_argument("fft_inplace: size mismatch");
  fftw_plan plan = detail::PlanCache::instance().get(dims, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace nlslab
