#pragma once

// Integer-order Bessel functions of the first kind by Miller's downward
// recurrence, normalized with J_0 + 2 sum_k J_2k = 1.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "kicked/summation.hpp"

namespace kicked {

inline constexpr double bessel_max_order = 1e6;
inline constexpr double bessel_max_argument = 1e6;

namespace detail {

inline void check_bessel_args(long order, double z) {
  if (!std::isfinite(z) || z < 0.0)
    throw std::domain_error("bessel_j: argument must be finite and >= 0");
  if (static_cast<double>(std::labs(order)) > bessel_max_order ||
      z > bessel_max_argument)
    throw std::range_error("bessel_j: order " + std::to_string(order) +
                           " / argument " + std::to_string(z) +
                           " outside the supported range [0, 1e6]");
}

// Even starting index well above both the order and the argument. The
// Airy-width term covers the transition region order ~ z.
inline long miller_start(long n, double z) {
  const double top = std::max(static_cast<double>(n), std::ceil(z));
  long m = static_cast<long>(top + 30.0 + std::ceil(15.0 * std::cbrt(top)));
  if (m % 2 != 0) ++m;
  return m;
}

inline constexpr double rescale_threshold = 1e250;
inline constexpr double rescale_factor = 1e-250;

// Below this argument the recurrence ratios 2k/z can overflow between
// rescalings; the ascending series converges in a handful of terms instead.
inline constexpr double small_argument = 1e-3;

inline double small_argument_series(long n, double z) {
  const double log_lead = static_cast<double>(n) * std::log(0.5 * z) -
                          std::lgamma(static_cast<double>(n) + 1.0);
  if (log_lead < -745.0) return 0.0;
  const double q = -0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 20; ++k) {
    term *= q / (static_cast<double>(k) * (static_cast<double>(n) + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::exp(log_lead) * sum;
}

}  // namespace detail

/// J_0(z), ..., J_max_order(z). Values that underflow double come back as 0.
inline std::vector<double> bessel_j_sequence(long max_order, double z) {
  if (max_order < 0) throw std::domain_error("bessel_j_sequence: max_order < 0");
  detail::check_bessel_args(max_order, z);
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (z < detail::small_argument) {
    for (long k = 0; k <= max_order; ++k)
      out[static_cast<std::size_t>(k)] = detail::small_argument_series(k, z);
    return out;
  }
  const long m = detail::miller_start(max_order, z);
  double next = 0.0;   // j_{k+1}
  double cur = 1e-300; // j_k, arbitrary seed
  CompensatedSum norm;
  for (long k = m; k >= 0; --k) {
    if (k <= max_order) out[static_cast<std::size_t>(k)] = cur;
    if (k % 2 == 0) norm += (k == 0 ? cur : 2.0 * cur);
    if (k == 0) break;
    const double prev = (2.0 * static_cast<double>(k) / z) * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > detail::rescale_threshold) {
      cur *= detail::rescale_factor;
      next *= detail::rescale_factor;
      const double s = norm.value() * detail::rescale_factor;
      norm = CompensatedSum{};
      norm += s;
      for (long i = k; i <= std::min(max_order, m); ++i)
        out[static_cast<std::size_t>(i)] *= detail::rescale_factor;
    }
  }
  const double scale = 1.0 / norm.value();
  for (double& v : out) v *= scale;
  return out;
}

/// J_order(z) for integer order (negative via J_{-m} = (-1)^m J_m), z >= 0.
/// Throws std::range_error outside |order| <= 1e6, z <= 1e6.
inline double bessel_j(long order, double z) {
  detail::check_bessel_args(order, z);
  const long n = std::labs(order);
  const double sign = (order < 0 && n % 2 == 1) ? -1.0 : 1.0;
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  if (z < detail::small_argument) return sign * detail::small_argument_series(n, z);
  const long m = detail::miller_start(n, z);
  double next = 0.0;
  double cur = 1e-300;
  double target = 0.0;
  CompensatedSum norm;
  for (long k = m; k >= 0; --k) {
    if (k == n) target = cur;
    if (k % 2 == 0) norm += (k == 0 ? cur : 2.0 * cur);
    if (k == 0) break;
    const double prev = (2.0 * static_cast<double>(k) / z) * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > detail::rescale_threshold) {
      cur *= detail::rescale_factor;
      next *= detail::rescale_factor;
      target *= detail::rescale_factor;
      const double s = norm.value() * detail::rescale_factor;
      norm = CompensatedSum{};
      norm += s;
    }
  }
  return sign * target / norm.value();
}

}  // namespace kicked
