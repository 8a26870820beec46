#pragma once

// One-step momentum transition kernels: the exact quantum kernel
// W_nu = |<n+nu| exp(-i lambda V / hbar) |n>|^2, the classical kernel of the
// randomized map, and the two large-order (Debye) asymptotic regimes that
// connect them.
//
// Kernel rows hold probabilities. Dividing by hbar gives a density in the
// momentum transfer, which is what the classical and semiclassical
// expressions below return.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kicked/errors.hpp"
#include "kicked/fft.hpp"
#include "kicked/model.hpp"
#include "kicked/random.hpp"
#include "kicked/summation.hpp"

namespace kicked {

struct KernelOptions {
  /// Largest acceptable probability beyond the kernel support.
  double tail_tolerance = 1e-10;
  /// Adaptive sizing stops at the first support whose tail is below this.
  double adaptive_target = 1e-18;
  bool renormalize = true;
};

/// Translation-invariant transition row W_nu, nu in [-K, K].
class TransitionKernel {
 public:
  TransitionKernel(double hbar, std::vector<double> row, double tail_mass,
                   bool renormalized)
      : hbar_(hbar), row_(std::move(row)), tail_mass_(tail_mass),
        renormalized_(renormalized) {
    if (row_.size() % 2 != 1) throw std::invalid_argument("kernel row must have odd length");
    for (double w : row_)
      if (!(w >= 0.0)) throw std::invalid_argument("kernel entries must be nonnegative");
  }

  double hbar() const noexcept { return hbar_; }
  long max_order() const noexcept { return static_cast<long>(row_.size() / 2); }
  std::span<const double> row() const noexcept { return row_; }
  /// 1 - sum of the row before renormalization.
  double tail_mass() const noexcept { return tail_mass_; }
  bool renormalized() const noexcept { return renormalized_; }

  double at(long nu) const noexcept {
    const long k = max_order();
    if (nu < -k || nu > k) return 0.0;
    return row_[static_cast<std::size_t>(nu + k)];
  }

  /// W_nu / hbar, the probability density of the momentum transfer.
  double density(long nu) const noexcept { return at(nu) / hbar_; }

  double sum() const { return compensated_sum(row_); }

  /// sum_nu (hbar nu)^k W_nu.
  double moment(int k) const {
    CompensatedSum acc;
    const long kmax = max_order();
    for (long nu = -kmax; nu <= kmax; ++nu) {
      const double dp = hbar_ * static_cast<double>(nu);
      acc += std::pow(dp, k) * at(nu);
    }
    return acc.value();
  }

 private:
  double hbar_;
  std::vector<double> row_;
  double tail_mass_;
  bool renormalized_;
};

/// Complex kick amplitudes c_nu = <n+nu| exp(-i lambda V/hbar) |n>.
struct KickAmplitudes {
  long max_order = 0;
  std::vector<std::complex<double>> amps;  // nu = -K..K
  /// sum over |nu| > K (up to the grid Nyquist order) of |c_nu|^2.
  double tail_mass = 0.0;

  std::complex<double> at(long nu) const {
    if (nu < -max_order || nu > max_order) return {};
    return amps[static_cast<std::size_t>(nu + max_order)];
  }
};

namespace detail {

// All G Fourier coefficients of exp(-i lambda V(x) / hbar), indexed by nu mod G.
inline std::vector<fft::cplx> kick_spectrum(const ModelParams& params,
                                            const Potential& v) {
  const std::size_t g = v.grid_points();
  const double z = params.kick_argument();
  std::vector<fft::cplx> buf(g);
  for (std::size_t j = 0; j < g; ++j)
    buf[j] = std::polar(1.0, -z * v.value(v.grid_point(j)));
  fft::forward(buf);
  const double inv = 1.0 / static_cast<double>(g);
  // Grid starts at -pi, so coefficient nu picks up exp(i nu pi) = (-1)^nu.
  for (std::size_t k = 0; k < g; ++k) buf[k] *= (k % 2 == 0 ? inv : -inv);
  return buf;
}

inline std::size_t spectrum_index(long nu, std::size_t g) {
  const long gl = static_cast<long>(g);
  return static_cast<std::size_t>(((nu % gl) + gl) % gl);
}

// Aliasing guard: power in the top eighth of the spectrum must be negligible.
inline void check_spectrum_resolved(const std::vector<fft::cplx>& spec) {
  const long g = static_cast<long>(spec.size());
  CompensatedSum edge;
  for (long nu = 3 * g / 8; nu <= g / 2; ++nu) {
    edge += std::norm(spec[spectrum_index(nu, spec.size())]);
    if (nu != g / 2) edge += std::norm(spec[spectrum_index(-nu, spec.size())]);
  }
  if (edge.value() > 1e-24)
    throw ResolutionError("kick spectrum not resolved on " + std::to_string(g) +
                          " grid points; raise grid_points");
}

inline double spectrum_tail(const std::vector<fft::cplx>& spec, long k) {
  const long g = static_cast<long>(spec.size());
  CompensatedSum tail;
  for (long nu = k + 1; nu <= g / 2; ++nu) {
    tail += std::norm(spec[spectrum_index(nu, spec.size())]);
    if (nu != g / 2) tail += std::norm(spec[spectrum_index(-nu, spec.size())]);
  }
  return tail.value();
}

}  // namespace detail

/// Kick amplitudes up to max_order by discrete Fourier transform of
/// exp(-i lambda V / hbar) on the potential grid. Requires max_order <= G/4.
inline KickAmplitudes kick_amplitudes(const ModelParams& params, const Potential& v,
                                      long max_order) {
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  if (static_cast<std::size_t>(4 * max_order) > v.grid_points())
    throw std::invalid_argument("max_order must not exceed grid_points/4");
  const auto spec = detail::kick_spectrum(params, v);
  detail::check_spectrum_resolved(spec);
  KickAmplitudes out;
  out.max_order = max_order;
  out.amps.resize(static_cast<std::size_t>(2 * max_order + 1));
  for (long nu = -max_order; nu <= max_order; ++nu)
    out.amps[static_cast<std::size_t>(nu + max_order)] =
        spec[detail::spectrum_index(nu, spec.size())];
  out.tail_mass = detail::spectrum_tail(spec, max_order);
  return out;
}

namespace detail {

inline TransitionKernel kernel_from_amplitudes(const ModelParams& params,
                                               const KickAmplitudes& ka,
                                               const KernelOptions& opt) {
  if (ka.tail_mass > opt.tail_tolerance)
    throw ToleranceError("kernel tail mass " + std::to_string(ka.tail_mass) +
                         " exceeds tolerance; raise max_order or grid_points");
  std::vector<double> row(ka.amps.size());
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = std::norm(ka.amps[i]);
  if (opt.renormalize) {
    const double s = compensated_sum(row);
    for (double& w : row) w /= s;
  }
  return TransitionKernel(params.hbar(), std::move(row), ka.tail_mass, opt.renormalize);
}

}  // namespace detail

/// Exact quantum kernel with a fixed support [-max_order, max_order].
inline TransitionKernel quantum_kernel(const ModelParams& params, const Potential& v,
                                       long max_order, const KernelOptions& opt = {}) {
  return detail::kernel_from_amplitudes(params, kick_amplitudes(params, v, max_order), opt);
}

/// Upper bound on the kernel support: z + 40 z^(1/3) + 50 with
/// z = lambda max|f| / hbar (the local kick frequency bound).
inline long default_order_ceiling(const ModelParams& params, const Potential& v) {
  const double z = params.kick_argument() * v.max_abs_force();
  return static_cast<long>(std::ceil(z + 40.0 * std::cbrt(z) + 50.0));
}

/// Transform grid able to carry a kernel of the given support.
inline Potential kernel_grid(const Potential& v, long max_order) {
  const std::size_t need = fft::next_pow2(static_cast<std::size_t>(4 * max_order));
  return need > v.grid_points() ? v.with_grid_points(need) : v;
}

/// Quantum kernel with the smallest support whose tail drops below
/// opt.adaptive_target, searched up to default_order_ceiling. The potential
/// grid is refined when the ceiling needs more points.
inline TransitionKernel adaptive_quantum_kernel(const ModelParams& params,
                                                const Potential& v,
                                                const KernelOptions& opt = {}) {
  const long ceiling = default_order_ceiling(params, v);
  const Potential grid = kernel_grid(v, ceiling);
  const auto spec = detail::kick_spectrum(params, grid);
  detail::check_spectrum_resolved(spec);
  const std::size_t g = spec.size();
  // Tail beyond k, built from the outside in.
  std::vector<double> tail_beyond(static_cast<std::size_t>(ceiling) + 1, 0.0);
  CompensatedSum acc;
  acc += detail::spectrum_tail(spec, ceiling);
  tail_beyond[static_cast<std::size_t>(ceiling)] = acc.value();
  for (long k = ceiling; k >= 1; --k) {
    acc += std::norm(spec[detail::spectrum_index(k, g)]);
    acc += std::norm(spec[detail::spectrum_index(-k, g)]);
    tail_beyond[static_cast<std::size_t>(k - 1)] = acc.value();
  }
  long k = 0;
  while (k < ceiling && tail_beyond[static_cast<std::size_t>(k)] >= opt.adaptive_target) ++k;
  KickAmplitudes ka;
  ka.max_order = k;
  ka.amps.resize(static_cast<std::size_t>(2 * k + 1));
  for (long nu = -k; nu <= k; ++nu)
    ka.amps[static_cast<std::size_t>(nu + k)] = spec[detail::spectrum_index(nu, g)];
  ka.tail_mass = tail_beyond[static_cast<std::size_t>(k)];
  return detail::kernel_from_amplitudes(params, ka, opt);
}

/// Classical one-step density of the momentum transfer for V = cos x:
/// (1/pi) (lambda^2 - dp^2)^(-1/2) inside |dp| < lambda, 0 outside, and
/// +infinity at the integrable endpoint singularities |dp| = lambda.
inline double classical_kernel_density(double delta_p, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("classical_kernel_density: lambda must be > 0");
  const double a = std::abs(delta_p);
  if (a > lambda) return 0.0;
  if (a == lambda) return std::numeric_limits<double>::infinity();
  return 1.0 / (pi * std::sqrt((lambda - a) * (lambda + a)));
}

/// Classical density averaged over the momentum cell [hbar(nu-1/2), hbar(nu+1/2)].
/// Finite everywhere and sums (times hbar) to exactly one.
inline double classical_kernel_cell_average(long nu, double hbar, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("classical_kernel_cell_average: lambda must be > 0");
  const double lo = std::clamp(hbar * (static_cast<double>(nu) - 0.5), -lambda, lambda);
  const double hi = std::clamp(hbar * (static_cast<double>(nu) + 0.5), -lambda, lambda);
  return (std::asin(hi / lambda) - std::asin(lo / lambda)) / (pi * hbar);
}

/// Monte Carlo histogram of dp = lambda f(xi), xi uniform on [-pi, pi).
struct KernelHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t samples = 0;
  std::uint64_t outside = 0;  // samples outside [lo, hi)

  std::size_t bins() const noexcept { return counts.size(); }
  double bin_width() const noexcept { return (hi - lo) / static_cast<double>(bins()); }
  double bin_center(std::size_t i) const noexcept {
    return lo + (static_cast<double>(i) + 0.5) * bin_width();
  }
  double density(std::size_t i) const noexcept {
    return static_cast<double>(counts[i]) / (static_cast<double>(samples) * bin_width());
  }
  /// Binomial standard error of density(i).
  double density_error(std::size_t i) const noexcept {
    const double p = static_cast<double>(counts[i]) / static_cast<double>(samples);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) / bin_width();
  }
  /// Total probability captured by the bins.
  double mass() const noexcept {
    std::uint64_t in = 0;
    for (auto c : counts) in += c;
    return static_cast<double>(in) / static_cast<double>(samples);
  }
};

/// Bins span [-lambda max|f|, lambda max|f|] (slightly padded).
inline KernelHistogram classical_kernel_histogram(const Potential& v, double lambda,
                                                  std::size_t bins, std::uint64_t samples,
                                                  std::uint64_t seed) {
  if (bins == 0 || samples == 0)
    throw std::invalid_argument("classical_kernel_histogram: bins and samples must be > 0");
  KernelHistogram h;
  const double reach = std::max(lambda * v.max_abs_force(), 1e-300) * (1.0 + 1e-9);
  h.lo = -reach;
  h.hi = reach;
  h.counts.assign(bins, 0);
  h.samples = samples;
  StreamRng rng(seed, 0);
  const double width = h.bin_width();
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double dp = lambda * v.force(rng.angle());
    const double u = (dp - h.lo) / width;
    if (u < 0.0 || u >= static_cast<double>(bins)) {
      ++h.outside;
      continue;
    }
    ++h.counts[static_cast<std::size_t>(u)];
  }
  return h;
}

/// Leading Debye approximation of W_q / hbar inside the classical range:
/// W_cl(dp) [1 + sin(2 sqrt(lambda^2 - dp^2)/hbar - (2 dp/hbar) arccos(dp/lambda))].
/// Valid for |dp|/hbar >> 1.
inline double semiclassical_oscillatory(double delta_p, const ModelParams& params) {
  const double lambda = params.lambda();
  const double a = std::abs(delta_p);
  if (!(a < lambda))
    throw std::domain_error("semiclassical_oscillatory: requires |delta_p| < lambda");
  const double h = params.hbar();
  const double root = std::sqrt((lambda - a) * (lambda + a));
  const double phase = 2.0 * root / h - (2.0 * a / h) * std::acos(a / lambda);
  return classical_kernel_density(a, lambda) * (1.0 + std::sin(phase));
}

/// Exponent (2 dp / hbar)(alpha - tanh alpha), cosh alpha = dp/lambda.
inline double semiclassical_tail_exponent(double delta_p, const ModelParams& params) {
  const double lambda = params.lambda();
  const double a = std::abs(delta_p);
  if (!(lambda > 0.0) || !(a > lambda))
    throw std::domain_error("semiclassical_tail: requires |delta_p| > lambda > 0");
  const double alpha = std::acosh(a / lambda);
  const double r = lambda / a;
  const double tanh_alpha = std::sqrt((1.0 - r) * (1.0 + r));
  return (2.0 * a / params.hbar()) * (alpha - tanh_alpha);
}

/// Debye approximation of W_q / hbar beyond the classical range:
/// exp(-(2 dp/hbar)(alpha - tanh alpha)) / (2 pi sqrt(dp^2 - lambda^2)).
inline double semiclassical_tail(double delta_p, const ModelParams& params) {
  const double exponent = semiclassical_tail_exponent(delta_p, params);
  const double a = std::abs(delta_p);
  const double lambda = params.lambda();
  return std::exp(-exponent) / (two_pi * std::sqrt((a - lambda) * (a + lambda)));
}

/// Local period, in units of nu, of the oscillation in the Debye formula:
/// pi / arccos(|dp| / lambda).
inline double oscillation_period_orders(double delta_p, double lambda) {
  const double a = std::abs(delta_p);
  if (!(a < lambda)) throw std::domain_error("oscillation period defined only for |dp| < lambda");
  return pi / std::acos(a / lambda);
}

/// Hann-weighted average of kernel densities around nu_center, with the
/// window reaching one local oscillation period on either side.
inline double windowed_density(const TransitionKernel& k, long nu_center, double lambda) {
  const double dp = k.hbar() * static_cast<double>(nu_center);
  const double half = oscillation_period_orders(dp, lambda);
  const long lo = static_cast<long>(std::floor(static_cast<double>(nu_center) - half));
  const long hi = static_cast<long>(std::ceil(static_cast<double>(nu_center) + half));
  CompensatedSum num, den;
  for (long nu = lo; nu <= hi; ++nu) {
    const double x = (static_cast<double>(nu - nu_center)) / half;
    if (std::abs(x) >= 1.0) continue;
    const double w = 0.5 * (1.0 + std::cos(pi * x));
    num += w * k.density(nu);
    den += w;
  }
  return num.value() / den.value();
}

}  // namespace kicked
