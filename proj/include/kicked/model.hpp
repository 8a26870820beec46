#pragma once

// Physical parameters, periodic potentials and the momentum lattice shared by
// every evolution backend.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kicked/errors.hpp"
#include "kicked/fft.hpp"
#include "kicked/summation.hpp"

namespace kicked {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Free Hamiltonian H0(p) together with its derivative H0'(p), which the
/// classical twist map needs.
struct FreeHamiltonian {
  std::function<double(double)> energy;
  std::function<double(double)> velocity;
  std::string name;

  /// H0 = p^2/2, unit moment of inertia.
  static FreeHamiltonian kinetic() {
    return {[](double p) { return 0.5 * p * p; }, [](double p) { return p; },
            "p^2/2"};
  }
};

/// Kick strength, effective hbar, kick period and measurement delay.
///
/// lambda = 0 is accepted: it is the identity-kick limit every module uses as
/// a sanity check.
class ModelParams {
 public:
  ModelParams(double lambda, double hbar, double period, double tau,
              FreeHamiltonian h0 = FreeHamiltonian::kinetic())
      : lambda_(lambda), hbar_(hbar), period_(period), tau_(tau),
        h0_(std::move(h0)) {
    if (!(std::isfinite(lambda) && lambda >= 0.0))
      throw ConfigError("lambda must be finite and >= 0");
    if (!(std::isfinite(hbar) && hbar > 0.0))
      throw ConfigError("hbar must be finite and > 0");
    if (!(std::isfinite(period) && period > 0.0))
      throw ConfigError("period must be finite and > 0");
    if (!(tau > 0.0 && tau < period))
      throw ConfigError("tau must lie strictly inside (0, period)");
    if (!std::isfinite(lambda / hbar))
      throw ConfigError("lambda/hbar is not representable");
    if (!h0_.energy || !h0_.velocity)
      throw ConfigError("free Hamiltonian needs both energy and velocity");
  }

  /// Measurement delay defaults to half a period.
  ModelParams(double lambda, double hbar, double period)
      : ModelParams(lambda, hbar, period, 0.5 * period) {}

  double lambda() const noexcept { return lambda_; }
  double hbar() const noexcept { return hbar_; }
  double period() const noexcept { return period_; }
  double tau() const noexcept { return tau_; }
  const FreeHamiltonian& free_hamiltonian() const noexcept { return h0_; }

  /// Dimensionless Bessel argument lambda/hbar.
  double kick_argument() const noexcept { return lambda_ / hbar_; }

  ModelParams with_lambda(double lambda) const {
    return {lambda, hbar_, period_, tau_, h0_};
  }
  ModelParams with_hbar(double hbar) const {
    return {lambda_, hbar, period_, tau_, h0_};
  }
  ModelParams with_tau(double tau) const {
    return {lambda_, hbar_, period_, tau, h0_};
  }

 private:
  double lambda_;
  double hbar_;
  double period_;
  double tau_;
  FreeHamiltonian h0_;
};

/// Periodic potential on [-pi, pi] stored as a finite trigonometric series
///   V(x) = sum_{k>=1} a_k cos(kx) + b_k sin(kx)
/// (the constant term is dropped; it only contributes a global phase).
/// grid_points is the resolution of quadratures and angle-grid transforms.
class Potential {
 public:
  static constexpr std::size_t default_grid_points = 1024;

  /// V = cos x.
  static Potential cosine(std::size_t grid_points = default_grid_points) {
    return Potential({1.0}, {}, grid_points, "cos");
  }

  /// cos_coeffs[k-1] multiplies cos(kx), sin_coeffs[k-1] multiplies sin(kx).
  static Potential fourier(std::vector<double> cos_coeffs,
                           std::vector<double> sin_coeffs,
                           std::size_t grid_points = default_grid_points,
                           std::string name = "fourier") {
    return Potential(std::move(cos_coeffs), std::move(sin_coeffs), grid_points,
                     std::move(name));
  }

  /// Samples an arbitrary callable on the grid and converts it to a series.
  /// Rejects non-periodic input and input whose spectrum is not resolved.
  static Potential sampled(const std::function<double(double)>& v,
                           std::size_t grid_points = default_grid_points,
                           std::string name = "sampled") {
    check_grid(grid_points);
    const double left = v(-pi);
    const double right = v(pi);
    std::vector<fft::cplx> buf(grid_points);
    double scale = 1.0;
    for (std::size_t j = 0; j < grid_points; ++j) {
      const double x = -pi + two_pi * static_cast<double>(j) /
                                 static_cast<double>(grid_points);
      const double vx = v(x);
      if (!std::isfinite(vx)) throw ConfigError("potential is not finite on the grid");
      buf[j] = vx;
      scale = std::max(scale, std::abs(vx));
    }
    if (std::abs(left - right) > 1e-10 * scale)
      throw ConfigError("potential is not periodic: V(-pi) != V(pi)");
    fft::forward(buf);
    const std::size_t half = grid_points / 2;
    std::vector<double> a(half - 1), b(half - 1);
    double peak = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
      // Grid starts at -pi: shift by exp(i k pi) = (-1)^k.
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const fft::cplx c = sign * buf[k] / static_cast<double>(grid_points);
      a[k - 1] = 2.0 * c.real();
      b[k - 1] = -2.0 * c.imag();
      peak = std::max(peak, std::hypot(a[k - 1], b[k - 1]));
    }
    double high = 0.0;
    for (std::size_t k = half / 2; k < half; ++k)
      high = std::max(high, std::hypot(a[k - 1], b[k - 1]));
    if (high > 1e-10 * std::max(peak, 1e-300))
      throw ResolutionError(
          "potential spectrum not resolved on the grid; raise grid_points");
    // Keep harmonics below G/4 and drop rounding noise.
    a.resize(half / 2 - 1);
    b.resize(half / 2 - 1);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k]) < 1e-14 * peak) a[k] = 0.0;
      if (std::abs(b[k]) < 1e-14 * peak) b[k] = 0.0;
    }
    return Potential(std::move(a), std::move(b), grid_points, std::move(name));
  }

  std::size_t grid_points() const noexcept { return grid_points_; }
  const std::string& name() const noexcept { return name_; }
  std::span<const double> cos_coeffs() const noexcept { return a_; }
  std::span<const double> sin_coeffs() const noexcept { return b_; }
  std::size_t harmonics() const noexcept { return a_.size(); }

  Potential with_grid_points(std::size_t g) const {
    return Potential(a_, b_, g, name_);
  }

  /// V(-x) = V(x) for every x.
  bool is_even() const noexcept {
    return std::all_of(b_.begin(), b_.end(), [](double c) { return c == 0.0; });
  }

  double value(double x) const noexcept { return series(x, 0); }
  /// V'(x).
  double derivative(double x) const noexcept { return series(x, 1); }
  /// V''(x).
  double second_derivative(double x) const noexcept { return series(x, 2); }
  /// f = -V'.
  double force(double x) const noexcept { return -series(x, 1); }
  /// f' = -V''.
  double force_derivative(double x) const noexcept { return -series(x, 2); }

  /// Grid abscissae x_j = -pi + 2 pi j / G.
  double grid_point(std::size_t j) const noexcept {
    return -pi + two_pi * static_cast<double>(j) / static_cast<double>(grid_points_);
  }

  /// max |f| over the grid.
  double max_abs_force() const {
    double m = 0.0;
    const std::size_t g = std::max<std::size_t>(grid_points_, 8 * harmonics() + 8);
    for (std::size_t j = 0; j < g; ++j) {
      const double x = -pi + two_pi * static_cast<double>(j) / static_cast<double>(g);
      m = std::max(m, std::abs(force(x)));
    }
    return m;
  }

 private:
  Potential(std::vector<double> a, std::vector<double> b, std::size_t g,
            std::string name)
      : a_(std::move(a)), b_(std::move(b)), grid_points_(g), name_(std::move(name)) {
    check_grid(g);
    const std::size_t n = std::max(a_.size(), b_.size());
    a_.resize(n, 0.0);
    b_.resize(n, 0.0);
    while (!a_.empty() && a_.back() == 0.0 && b_.back() == 0.0) {
      a_.pop_back();
      b_.pop_back();
    }
    for (std::size_t k = 0; k < a_.size(); ++k)
      if (!std::isfinite(a_[k]) || !std::isfinite(b_[k]))
        throw ConfigError("potential coefficients must be finite");
    if (4 * a_.size() >= grid_points_)
      throw ResolutionError("grid_points too small for the potential's harmonics");
  }

  static void check_grid(std::size_t g) {
    if (!fft::is_pow2(g) || g < 8)
      throw ConfigError("grid_points must be a power of two >= 8");
  }

  // d-th derivative of the series.
  double series(double x, int d) const noexcept {
    double s = 0.0;
    const std::complex<double> step(std::cos(x), std::sin(x));
    std::complex<double> rot = step;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double k = static_cast<double>(i + 1);
      // Re-anchor periodically to bound recurrence drift.
      if (i > 0 && i % 16 == 0) rot = std::polar(1.0, k * x);
      const double c = rot.real();
      const double sn = rot.imag();
      switch (d) {
        case 0: s += a_[i] * c + b_[i] * sn; break;
        case 1: s += k * (-a_[i] * sn + b_[i] * c); break;
        default: s += k * k * (-a_[i] * c - b_[i] * sn); break;
      }
      rot *= step;
    }
    return s;
  }

  std::vector<double> a_;
  std::vector<double> b_;
  std::size_t grid_points_;
  std::string name_;
};

namespace detail {

// Trapezoidal average (1/2pi) int g(x) dx on a uniform periodic grid of size n.
template <class F>
double periodic_average(F&& g, std::size_t n) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < n; ++j)
    acc += g(-pi + two_pi * static_cast<double>(j) / static_cast<double>(n));
  return acc.value() / static_cast<double>(n);
}

template <class F>
double converged_average(F&& g, std::size_t n, const char* what) {
  const double coarse = periodic_average(g, n);
  const double fine = periodic_average(g, 2 * n);
  if (std::abs(coarse - fine) > 1e-10)
    throw ResolutionError(std::string(what) +
                          ": quadrature not converged; raise grid_points");
  return coarse;
}

}  // namespace detail

/// Angle average <f^k> = (1/2pi) int f(x)^k dx, k in 1..4.
inline double force_moment(const Potential& v, int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("force_moment: k must be in 1..4");
  return detail::converged_average(
      [&](double x) { return std::pow(v.force(x), k); }, v.grid_points(),
      "force_moment");
}

/// <(f')^2>, the source of the hbar^2 term in the fourth-moment recursion.
inline double force_derivative_moment(const Potential& v) {
  return detail::converged_average(
      [&](double x) {
        const double d = v.force_derivative(x);
        return d * d;
      },
      v.grid_points(), "force_derivative_moment");
}

/// Occupation probabilities P_n on the truncated lattice n in [-M, M].
/// lost_mass accumulates probability that has left the lattice.
class MomentumDistribution {
 public:
  static MomentumDistribution delta(long half_width, long n0) {
    check_half_width(half_width);
    if (std::abs(n0) > half_width)
      throw ConfigError("initial momentum index outside the lattice");
    std::vector<double> p(static_cast<std::size_t>(2 * half_width + 1), 0.0);
    p[static_cast<std::size_t>(n0 + half_width)] = 1.0;
    return MomentumDistribution(half_width, std::move(p), 0.0);
  }

  /// Uniform over n in [lo, hi].
  static MomentumDistribution uniform(long half_width, long lo, long hi) {
    check_half_width(half_width);
    if (lo > hi || lo < -half_width || hi > half_width)
      throw ConfigError("uniform range outside the lattice");
    std::vector<double> p(static_cast<std::size_t>(2 * half_width + 1), 0.0);
    const double w = 1.0 / static_cast<double>(hi - lo + 1);
    for (long n = lo; n <= hi; ++n) p[static_cast<std::size_t>(n + half_width)] = w;
    return MomentumDistribution(half_width, std::move(p), 0.0);
  }

  /// Validates nonnegativity and unit mass (1e-12).
  static MomentumDistribution from_probs(long half_width, std::vector<double> probs,
                                         double lost_mass = 0.0) {
    check_half_width(half_width);
    if (probs.size() != static_cast<std::size_t>(2 * half_width + 1))
      throw ConfigError("probability vector length must be 2M+1");
    for (double x : probs)
      if (!(x >= 0.0)) throw ConfigError("probabilities must be nonnegative");
    if (std::abs(compensated_sum(probs) - 1.0) > 1e-12)
      throw ConfigError("probabilities must sum to 1");
    return MomentumDistribution(half_width, std::move(probs), lost_mass);
  }

  long half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double lost_mass() const noexcept { return lost_mass_; }

  double at(long n) const {
    if (std::abs(n) > half_width_) return 0.0;
    return probs_[static_cast<std::size_t>(n + half_width_)];
  }

  double total() const { return compensated_sum(probs_); }

 private:
  MomentumDistribution(long m, std::vector<double> p, double lost)
      : half_width_(m), probs_(std::move(p)), lost_mass_(lost) {}

  static void check_half_width(long m) {
    if (m < 1) throw ConfigError("half_width must be a positive integer");
  }

  long half_width_;
  std::vector<double> probs_;
  double lost_mass_;
};

/// sum_n (n hbar)^k P_n, k in 0..4.
inline double momentum_moment(std::span<const double> probs, long half_width,
                              double hbar, int k) {
  if (k < 0 || k > 4) throw std::invalid_argument("momentum_moment: k must be in 0..4");
  CompensatedSum acc;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    const double p = static_cast<double>(static_cast<long>(i) - half_width) * hbar;
    double pk = 1.0;
    for (int j = 0; j < k; ++j) pk *= p;
    acc += pk * probs[i];
  }
  return acc.value();
}

inline double momentum_moment(const MomentumDistribution& dist, double hbar, int k) {
  return momentum_moment(dist.probs(), dist.half_width(), hbar, k);
}

}  // namespace kicked
