#pragma once

// Unmeasured quantum evolution of a pure state in the momentum basis:
// free propagation is diagonal, the kick is diagonal on the angle grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kicked/errors.hpp"
#include "kicked/fft.hpp"
#include "kicked/kernels.hpp"
#include "kicked/measured_evolution.hpp"
#include "kicked/model.hpp"
#include "kicked/summation.hpp"

namespace kicked {

inline constexpr double default_norm_tolerance = 1e-8;

/// Amplitudes psi_n, n in [-M, M]; norm_loss accumulates norm dropped at the
/// lattice edges.
class WaveFunction {
 public:
  using cplx = std::complex<double>;

  static WaveFunction eigenstate(long half_width, long n) {
    check(half_width);
    if (std::abs(n) > half_width) throw ConfigError("eigenstate index outside the lattice");
    std::vector<cplx> a(static_cast<std::size_t>(2 * half_width + 1));
    a[static_cast<std::size_t>(n + half_width)] = 1.0;
    return WaveFunction(half_width, std::move(a), 0.0);
  }

  /// Validates unit norm to 1e-12.
  static WaveFunction from_amplitudes(long half_width, std::vector<cplx> amps,
                                      double norm_loss = 0.0) {
    check(half_width);
    if (amps.size() != static_cast<std::size_t>(2 * half_width + 1))
      throw ConfigError("amplitude vector length must be 2M+1");
    WaveFunction w(half_width, std::move(amps), norm_loss);
    if (std::abs(w.norm() - 1.0) > 1e-12) throw ConfigError("wave function must have unit norm");
    return w;
  }

  long half_width() const noexcept { return half_width_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  double norm_loss() const noexcept { return norm_loss_; }

  cplx at(long n) const {
    if (std::abs(n) > half_width_) return {};
    return amps_[static_cast<std::size_t>(n + half_width_)];
  }

  /// sum |psi_n|^2.
  double norm() const {
    CompensatedSum s;
    for (const auto& a : amps_) s += std::norm(a);
    return s.value();
  }

 private:
  WaveFunction(long m, std::vector<cplx> a, double loss)
      : half_width_(m), amps_(std::move(a)), norm_loss_(loss) {}

  static void check(long m) {
    if (m < 1) throw ConfigError("half_width must be a positive integer");
  }

  friend class Kicker;
  friend WaveFunction free_propagate(const WaveFunction&, const ModelParams&, double);

  long half_width_;
  std::vector<cplx> amps_;
  double norm_loss_;
};

/// psi'_n = exp(-i H0(n hbar) t / hbar) psi_n.
inline WaveFunction free_propagate(const WaveFunction& psi, const ModelParams& params,
                                   double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("free_propagate: t must be >= 0");
  WaveFunction out = psi;
  const long m = psi.half_width();
  const double h = params.hbar();
  const auto& energy = params.free_hamiltonian().energy;
  for (long n = -m; n <= m; ++n) {
    auto& a = out.amps_[static_cast<std::size_t>(n + m)];
    if (a == WaveFunction::cplx{}) continue;
    a *= std::polar(1.0, -energy(static_cast<double>(n) * h) * t / h);
  }
  return out;
}

/// Applies exp(-i lambda V(x) / hbar) through the angle representation.
/// The angle grid has at least 2(2M+1) points and enough resolution for the
/// kick's own bandwidth, so the product is alias-free.
class Kicker {
 public:
  Kicker(long half_width, const ModelParams& params, const Potential& v,
         double norm_tolerance = default_norm_tolerance)
      : half_width_(half_width), tolerance_(norm_tolerance) {
    const std::size_t lattice = fft::next_pow2(static_cast<std::size_t>(2 * (2 * half_width + 1)));
    const std::size_t bandwidth =
        fft::next_pow2(static_cast<std::size_t>(4 * default_order_ceiling(params, v)));
    grid_ = std::max({lattice, bandwidth, v.grid_points()});
    phase_.resize(grid_);
    const double z = params.kick_argument();
    for (std::size_t j = 0; j < grid_; ++j) {
      const double x = two_pi * static_cast<double>(j) / static_cast<double>(grid_);
      phase_[j] = std::polar(1.0 / static_cast<double>(grid_), -z * v.value(x));
    }
  }

  std::size_t grid_points() const noexcept { return grid_; }

  WaveFunction apply(const WaveFunction& psi) const {
    if (psi.half_width() != half_width_)
      throw std::invalid_argument("Kicker: lattice size mismatch");
    const long m = half_width_;
    const long g = static_cast<long>(grid_);
    auto idx = [g](long n) { return static_cast<std::size_t>(((n % g) + g) % g); };
    std::vector<fft::cplx> buf(grid_);
    for (long n = -m; n <= m; ++n) buf[idx(n)] = psi.amps_[static_cast<std::size_t>(n + m)];
    fft::backward(buf);  // psi(x_j) sqrt(2 pi)
    for (std::size_t j = 0; j < grid_; ++j) buf[j] *= phase_[j];
    fft::forward(buf);
    CompensatedSum kept, lost;
    std::vector<fft::cplx> amps(static_cast<std::size_t>(2 * m + 1));
    for (long n = -g / 2 + 1; n <= g / 2; ++n) {
      const fft::cplx c = buf[idx(n)];
      if (std::abs(n) <= m) {
        amps[static_cast<std::size_t>(n + m)] = c;
        kept += std::norm(c);
      } else {
        lost += std::norm(c);
      }
    }
    const double cumulative = psi.norm_loss_ + lost.value();
    if (cumulative > tolerance_)
      throw LatticeOverflow("norm loss " + std::to_string(cumulative) +
                                " exceeds tolerance; enlarge half_width beyond " +
                                std::to_string(m),
                            2 * m);
    const double scale = 1.0 / std::sqrt(kept.value());
    for (auto& a : amps) a *= scale;
    return WaveFunction(m, std::move(amps), cumulative);
  }

 private:
  long half_width_;
  double tolerance_;
  std::size_t grid_ = 0;
  std::vector<fft::cplx> phase_;
};

inline WaveFunction kick(const WaveFunction& psi, const ModelParams& params,
                         const Potential& v) {
  return Kicker(psi.half_width(), params, v).apply(psi);
}

/// Projective momentum measurement: P_n = |psi_n|^2.
inline MomentumDistribution collapse(const WaveFunction& psi) {
  std::vector<double> p;
  p.reserve(psi.amplitudes().size());
  for (const auto& a : psi.amplitudes()) p.push_back(std::norm(a));
  const double s = compensated_sum(p);
  for (double& x : p) x /= s;
  return MomentumDistribution::from_probs(psi.half_width(), std::move(p), psi.norm_loss());
}

/// U_free(tau) U_kick U_free(T - tau): measurement-to-measurement propagator.
inline WaveFunction period_propagate(const WaveFunction& psi, const ModelParams& params,
                                     const Potential& v) {
  auto a = free_propagate(psi, params, params.period() - params.tau());
  a = kick(a, params, v);
  return free_propagate(a, params, params.tau());
}

inline MomentRecord measure(const WaveFunction& psi, double hbar, long step) {
  std::vector<double> p;
  p.reserve(psi.amplitudes().size());
  for (const auto& a : psi.amplitudes()) p.push_back(std::norm(a));
  return {step,
          momentum_moment(p, psi.half_width(), hbar, 1),
          momentum_moment(p, psi.half_width(), hbar, 2),
          momentum_moment(p, psi.half_width(), hbar, 3),
          momentum_moment(p, psi.half_width(), hbar, 4),
          psi.norm_loss()};
}

struct UnitaryRun {
  MomentTrajectory trajectory;  // tail_mass holds the cumulative norm loss
  WaveFunction final_state;
};

/// free_propagate(T) then kick, `steps` times.
inline UnitaryRun evolve_unitary(const WaveFunction& psi0, const ModelParams& params,
                                 const Potential& v, long steps,
                                 double norm_tolerance = default_norm_tolerance) {
  if (steps < 1) throw std::invalid_argument("evolve_unitary: steps must be >= 1");
  const Kicker kicker(psi0.half_width(), params, v, norm_tolerance);
  UnitaryRun run{{{}, Provenance::simulated}, psi0};
  run.trajectory.records.reserve(static_cast<std::size_t>(steps) + 1);
  run.trajectory.records.push_back(measure(psi0, params.hbar(), 0));
  for (long n = 1; n <= steps; ++n) {
    run.final_state = kicker.apply(free_propagate(run.final_state, params, params.period()));
    run.trajectory.records.push_back(measure(run.final_state, params.hbar(), n));
  }
  return run;
}

/// Non-empty when T hbar / (4 pi) lies within 1e-6 of p/q with q <= 8, where
/// the free phases of the kicked rotator become commensurate (quantum
/// resonance) and ballistic growth would masquerade as diffusion.
inline std::optional<std::string> resonance_warning(const ModelParams& params) {
  const double r = params.period() * params.hbar() / (4.0 * pi);
  for (int q = 1; q <= 8; ++q) {
    const double p = std::round(r * q);
    if (p > 0.0 && std::abs(r - p / q) < 1e-6)
      return "T*hbar/(4 pi) = " + std::to_string(r) + " is near the resonance " +
             std::to_string(static_cast<long>(p)) + "/" + std::to_string(q);
  }
  return std::nullopt;
}

}  // namespace kicked
