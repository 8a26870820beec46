#pragma once

// Kick-plus-measurement dynamics: the master equation
//   P_n(N) = sum_m W_{n-m} P_m(N-1)
// on a truncated, absorbing momentum lattice, and the closed moment
// recursions it must reproduce.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kicked/errors.hpp"
#include "kicked/fft.hpp"
#include "kicked/kernels.hpp"
#include "kicked/model.hpp"
#include "kicked/statistics.hpp"
#include "kicked/summation.hpp"

namespace kicked {

inline constexpr double default_lattice_tolerance = 1e-10;

struct MomentRecord {
  long step = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  /// Cumulative probability (or norm) lost off the lattice.
  double tail_mass = 0.0;

  double variance() const noexcept { return p2 - p1 * p1; }
  double moment(int k) const {
    switch (k) {
      case 1: return p1;
      case 2: return p2;
      case 3: return p3;
      case 4: return p4;
      default: throw std::invalid_argument("moment order must be in 1..4");
    }
  }
};

enum class Provenance { simulated, recursion, ensemble };

inline const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::simulated: return "simulated";
    case Provenance::recursion: return "recursion";
    case Provenance::ensemble: return "ensemble";
  }
  return "?";
}

/// Per-step moments <p^k>_N, k = 1..4, contiguous from N = 0.
struct MomentTrajectory {
  std::vector<MomentRecord> records;
  Provenance provenance = Provenance::simulated;

  std::size_t size() const noexcept { return records.size(); }
  long steps() const noexcept { return records.empty() ? 0 : records.back().step; }
  const MomentRecord& operator[](std::size_t i) const { return records[i]; }
  const MomentRecord& back() const { return records.back(); }
};

inline MomentRecord measure(const MomentumDistribution& d, double hbar, long step) {
  return {step,
          momentum_moment(d, hbar, 1),
          momentum_moment(d, hbar, 2),
          momentum_moment(d, hbar, 3),
          momentum_moment(d, hbar, 4),
          d.lost_mass()};
}

enum class ConvolutionMethod { direct, spectral };

struct EvolveOptions {
  ConvolutionMethod method = ConvolutionMethod::direct;
  /// Largest cumulative probability allowed to leave the lattice.
  double tolerance = default_lattice_tolerance;
};

namespace detail {

// Finish a step from the unclipped convolution over [-M-K, M+K]: drop the
// off-lattice mass, check it, renormalize.
inline MomentumDistribution clip_to_lattice(const MomentumDistribution& from,
                                            const std::vector<double>& full, long k,
                                            double tolerance) {
  const long m = from.half_width();
  CompensatedSum lost_acc;
  for (long i = 0; i < k; ++i) {
    lost_acc += full[static_cast<std::size_t>(i)];
    lost_acc += full[static_cast<std::size_t>(2 * m + k + 1 + i)];
  }
  const double lost = lost_acc.value();
  const double cumulative = from.lost_mass() + lost;
  if (cumulative > tolerance) {
    // Smallest half-width that would have kept this step within tolerance,
    // padded by one kernel width.
    const double budget = std::max(tolerance - from.lost_mass(), 0.0);
    long need = m + k;
    CompensatedSum beyond;
    for (long r = m + k; r > m; --r) {
      beyond += full[static_cast<std::size_t>(r + m + k)];
      beyond += full[static_cast<std::size_t>(-r + m + k)];
      if (beyond.value() > 0.5 * budget) break;
      need = r - 1;
    }
    const long required = need + 2 * k;
    throw LatticeOverflow("lattice overflow: off-lattice mass " + std::to_string(cumulative) +
                              " exceeds tolerance; half_width must be at least " +
                              std::to_string(required),
                          required);
  }
  std::vector<double> probs(full.begin() + k, full.begin() + k + 2 * m + 1);
  for (double& p : probs) p = std::max(p, 0.0);
  const double s = compensated_sum(probs);
  for (double& p : probs) p /= s;
  return MomentumDistribution::from_probs(m, std::move(probs), cumulative);
}

inline std::vector<double> convolve_direct(const MomentumDistribution& d,
                                           const TransitionKernel& w) {
  const long m = d.half_width();
  const long k = w.max_order();
  std::vector<double> full(static_cast<std::size_t>(2 * (m + k) + 1), 0.0);
  const auto p = d.probs();
  const auto row = w.row();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi_ = p[i];
    if (pi_ == 0.0) continue;
    // n = (i - m) + nu  ->  full index i + nu + k = i + j.
    double* out = full.data() + i;
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j] * pi_;
  }
  return full;
}

/// Periodic-buffer FFT convolution with enough padding that it equals the
/// linear convolution.
class SpectralConvolver {
 public:
  SpectralConvolver(const TransitionKernel& w, long half_width)
      : m_(half_width), k_(w.max_order()),
        size_(fft::next_pow2(static_cast<std::size_t>(2 * (half_width + k_) + 1))),
        kernel_hat_(size_) {
    for (long nu = -k_; nu <= k_; ++nu)
      kernel_hat_[index(nu)] = w.at(nu);
    fft::forward(kernel_hat_);
  }

  std::vector<double> apply(const MomentumDistribution& d) const {
    std::vector<fft::cplx> buf(size_);
    const auto p = d.probs();
    for (std::size_t i = 0; i < p.size(); ++i) buf[i] = p[i];
    fft::forward(buf);
    for (std::size_t i = 0; i < size_; ++i) buf[i] *= kernel_hat_[i];
    fft::backward(buf);
    const double inv = 1.0 / static_cast<double>(size_);
    std::vector<double> full(static_cast<std::size_t>(2 * (m_ + k_) + 1));
    for (long n = -m_ - k_; n <= m_ + k_; ++n)
      full[static_cast<std::size_t>(n + m_ + k_)] =
          std::max(buf[index(n + m_)].real() * inv, 0.0);
    return full;
  }

 private:
  std::size_t index(long i) const {
    const long s = static_cast<long>(size_);
    return static_cast<std::size_t>(((i % s) + s) % s);
  }

  long m_;
  long k_;
  std::size_t size_;
  std::vector<fft::cplx> kernel_hat_;
};

}  // namespace detail

/// One kick-plus-measurement step, absorbing at the lattice edges.
inline MomentumDistribution master_step(const MomentumDistribution& dist,
                                        const TransitionKernel& kernel,
                                        double tolerance = default_lattice_tolerance) {
  return detail::clip_to_lattice(dist, detail::convolve_direct(dist, kernel),
                                 kernel.max_order(), tolerance);
}

struct MeasuredRun {
  MomentTrajectory trajectory;
  MomentumDistribution final_distribution;
};

/// Iterates the master equation, recording all four moments after each step.
inline MeasuredRun evolve_measured(const MomentumDistribution& dist0,
                                   const TransitionKernel& kernel, long steps,
                                   const EvolveOptions& opt = {}) {
  if (steps < 1) throw std::invalid_argument("evolve_measured: steps must be >= 1");
  const double hbar = kernel.hbar();
  MeasuredRun run{{{}, Provenance::simulated}, dist0};
  run.trajectory.records.reserve(static_cast<std::size_t>(steps) + 1);
  run.trajectory.records.push_back(measure(dist0, hbar, 0));
  std::optional<detail::SpectralConvolver> spectral;
  if (opt.method == ConvolutionMethod::spectral)
    spectral.emplace(kernel, dist0.half_width());
  for (long n = 1; n <= steps; ++n) {
    const auto& cur = run.final_distribution;
    auto full = spectral ? spectral->apply(cur) : detail::convolve_direct(cur, kernel);
    run.final_distribution =
        detail::clip_to_lattice(cur, full, kernel.max_order(), opt.tolerance);
    run.trajectory.records.push_back(measure(run.final_distribution, hbar, n));
  }
  return run;
}

/// Distribution after `steps` steps in one shot, raising the kernel's
/// transform to the power `steps` on a periodic domain wide enough that
/// nothing wraps. Agrees with the step-by-step path whenever the lattice is
/// adequate (nothing reaches the edges).
inline MomentumDistribution propagate_spectral(const MomentumDistribution& dist0,
                                               const TransitionKernel& kernel, long steps,
                                               double tolerance = default_lattice_tolerance) {
  if (steps < 1) throw std::invalid_argument("propagate_spectral: steps must be >= 1");
  const long m = dist0.half_width();
  const long reach = steps * kernel.max_order();
  const std::size_t size = fft::next_pow2(static_cast<std::size_t>(2 * (m + reach) + 1));
  const long s = static_cast<long>(size);
  auto idx = [s](long i) { return static_cast<std::size_t>(((i % s) + s) % s); };
  std::vector<fft::cplx> w(size), p(size);
  for (long nu = -kernel.max_order(); nu <= kernel.max_order(); ++nu) w[idx(nu)] = kernel.at(nu);
  for (long n = -m; n <= m; ++n) p[idx(n)] = dist0.at(n);
  fft::forward(w);
  fft::forward(p);
  for (std::size_t i = 0; i < size; ++i) {
    fft::cplx power(1.0, 0.0), base = w[i];
    for (long e = steps; e > 0; e >>= 1) {
      if (e & 1) power *= base;
      base *= base;
    }
    p[i] *= power;
  }
  fft::backward(p);
  const double inv = 1.0 / static_cast<double>(size);
  std::vector<double> probs(static_cast<std::size_t>(2 * m + 1));
  CompensatedSum inside, all;
  for (long n = -m - reach; n <= m + reach; ++n) {
    const double v = std::max(p[idx(n)].real() * inv, 0.0);
    all += v;
    if (std::abs(n) <= m) {
      probs[static_cast<std::size_t>(n + m)] = v;
      inside += v;
    }
  }
  const double lost = std::max(all.value() - inside.value(), 0.0);
  const double cumulative = dist0.lost_mass() + lost;
  if (cumulative > tolerance)
    throw LatticeOverflow("lattice overflow in spectral propagation; half_width must be at least " +
                              std::to_string(m + reach),
                          m + reach);
  for (double& v : probs) v /= inside.value();
  return MomentumDistribution::from_probs(m, std::move(probs), cumulative);
}

/// Angle averages entering the moment recursions.
struct ForceMoments {
  double f2 = 0.0;   // <f^2>
  double f3 = 0.0;   // <f^3>
  double f4 = 0.0;   // <f^4>
  double fp2 = 0.0;  // <(f')^2>

  static ForceMoments of(const Potential& v) {
    return {force_moment(v, 2), force_moment(v, 3), force_moment(v, 4),
            force_derivative_moment(v)};
  }
};

enum class RecursionBranch { quantum, classical };

/// Closed moment recursions. The quantum branch carries the extra
/// lambda^2 hbar^2 <(f')^2> per step in <p^4>; the randomized classical branch
/// does not.
inline MomentTrajectory moment_recursion(const ModelParams& params, const ForceMoments& fm,
                                         const std::array<double, 4>& initial, long steps,
                                         RecursionBranch branch = RecursionBranch::quantum) {
  if (steps < 1) throw std::invalid_argument("moment_recursion: steps must be >= 1");
  const double var0 = initial[1] - initial[0] * initial[0];
  if (var0 < -1e-12 * std::max(1.0, initial[1]))
    throw std::invalid_argument("moment_recursion: initial moments have negative variance");
  const double l = params.lambda();
  const double l2 = l * l, l3 = l2 * l, l4 = l2 * l2;
  const double h2 = params.hbar() * params.hbar();
  const double q = branch == RecursionBranch::quantum ? 1.0 : 0.0;
  MomentTrajectory t{{}, Provenance::recursion};
  t.records.reserve(static_cast<std::size_t>(steps) + 1);
  MomentRecord r{0, initial[0], initial[1], initial[2], initial[3], 0.0};
  t.records.push_back(r);
  for (long n = 1; n <= steps; ++n) {
    const MomentRecord prev = r;
    r.step = n;
    r.p1 = prev.p1;
    r.p2 = prev.p2 + l2 * fm.f2;
    r.p3 = prev.p3 + 3.0 * l2 * fm.f2 * prev.p1 + l3 * fm.f3;
    r.p4 = prev.p4 + 6.0 * l2 * fm.f2 * prev.p2 + 4.0 * l3 * fm.f3 * prev.p1 + l4 * fm.f4 +
           q * l2 * h2 * fm.fp2;
    t.records.push_back(r);
  }
  return t;
}

inline MomentTrajectory moment_recursion(const ModelParams& params, const Potential& v,
                                         const std::array<double, 4>& initial, long steps,
                                         RecursionBranch branch = RecursionBranch::quantum) {
  return moment_recursion(params, ForceMoments::of(v), initial, steps, branch);
}

struct DiffusionFit {
  double friction = 0.0;   // F, slope of <p> against N T
  double diffusion = 0.0;  // D, slope of <dp^2> against N T
  double residual = 0.0;   // max residual of either fit
};

/// Least-squares F and D from records [from_step, end].
inline DiffusionFit diffusion_fit(const MomentTrajectory& traj, double period,
                                  long from_step = 0) {
  if (!(period > 0.0)) throw std::invalid_argument("diffusion_fit: period must be > 0");
  std::vector<double> t, p1, var;
  for (const auto& r : traj.records) {
    if (r.step < from_step) continue;
    t.push_back(static_cast<double>(r.step) * period);
    p1.push_back(r.p1);
    var.push_back(r.variance());
  }
  if (t.size() < 10)
    throw std::invalid_argument("diffusion_fit: need a trajectory of at least 10 records");
  const auto ff = fit_line(t, p1);
  const auto fd = fit_line(t, var);
  return {ff.slope, fd.slope, std::max(ff.max_residual, fd.max_residual)};
}

/// Diffusive lattice estimate |n0| + ceil(8 sqrt(steps lambda^2 <f^2>) / hbar) + K.
inline long diffusive_half_width(long n0, long steps, double lambda, double f2, double hbar,
                                 long kernel_order) {
  const double spread = 8.0 * std::sqrt(static_cast<double>(steps) * lambda * lambda * f2) / hbar;
  return std::labs(n0) + static_cast<long>(std::ceil(spread)) + kernel_order + 1;
}

/// Worst-case lattice |n0| + steps K: nothing can ever reach the edge.
inline long safe_half_width(long n0, long steps, long kernel_order) {
  return std::labs(n0) + steps * kernel_order + 1;
}

}  // namespace kicked
