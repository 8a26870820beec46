#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>

namespace kicked::fft {

using cplx = std::complex<double>;

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Planning is not thread-safe in FFTW; execution of an existing plan on new
// arrays (fftw_execute_dft) is. Plans are created once per (size, sign).
inline fftw_plan plan_for(std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, PlanHandle> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.get();
  auto* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (p == nullptr) throw std::runtime_error("fftw: plan creation failed");
  cache.emplace(key, PlanHandle(p));
  return p;
}

inline void execute(std::span<cplx> data, int sign) {
  if (data.empty()) return;
  fftw_plan p = plan_for(data.size(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace detail

/// In-place unnormalized forward transform: X_k = sum_j x_j exp(-2 pi i jk/n).
inline void forward(std::span<cplx> data) { detail::execute(data, FFTW_FORWARD); }

/// In-place unnormalized backward transform: x_j = sum_k X_k exp(+2 pi i jk/n).
inline void backward(std::span<cplx> data) { detail::execute(data, FFTW_BACKWARD); }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace kicked::fft
