#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "kicked/summation.hpp"

namespace kicked {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  if (sxx.value() <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    fit.max_residual = std::max(
        fit.max_residual, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  return fit;
}

/// Jackknife standard error from leave-one-block-out estimates.
inline double jackknife_error(std::span<const double> leave_one_out) {
  const std::size_t b = leave_one_out.size();
  if (b < 2) return 0.0;
  CompensatedSum s;
  for (double v : leave_one_out) s += v;
  const double mean = s.value() / static_cast<double>(b);
  CompensatedSum ss;
  for (double v : leave_one_out) ss += (v - mean) * (v - mean);
  return std::sqrt(static_cast<double>(b - 1) / static_cast<double>(b) * ss.value());
}

}  // namespace kicked
