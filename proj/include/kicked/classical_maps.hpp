#pragma once

// Classical radial twisting map (the standard map for H0 = p^2/2, V = cos x)
// and its randomized version, where the angle after each kick is replaced by
// a fresh uniform variable. Ensembles carry block-wise moment sums so any
// derived statistic gets a jackknife error bar.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "kicked/measured_evolution.hpp"
#include "kicked/model.hpp"
#include "kicked/random.hpp"
#include "kicked/statistics.hpp"
#include "kicked/summation.hpp"

namespace kicked {

struct PhasePoint {
  double x = 0.0;  // angle in [-pi, pi)
  double p = 0.0;
};

/// Centered remainder onto [-pi, pi).
inline double wrap_angle(double x) noexcept {
  double r = x - two_pi * std::floor((x + pi) / two_pi);
  if (r >= pi) r -= two_pi;
  if (r < -pi) r += two_pi;
  return r;
}

/// x' = wrap(x + H0'(p) T), p' = p - lambda V'(x').
inline PhasePoint twist_step(const PhasePoint& pt, const ModelParams& params,
                             const Potential& v) {
  const double x = wrap_angle(pt.x + params.free_hamiltonian().velocity(pt.p) * params.period());
  return {x, pt.p - params.lambda() * v.derivative(x)};
}

/// Exact inverse of twist_step.
inline PhasePoint inverse_twist_step(const PhasePoint& pt, const ModelParams& params,
                                     const Potential& v) {
  const double p = pt.p + params.lambda() * v.derivative(pt.x);
  return {wrap_angle(pt.x - params.free_hamiltonian().velocity(p) * params.period()), p};
}

/// x' = xi ~ U[-pi, pi), p' = p - lambda V'(x').
template <class Rng>
PhasePoint randomized_step(const PhasePoint& pt, const ModelParams& params,
                           const Potential& v, Rng& rng) {
  const double x = rng.angle();
  return {x, pt.p - params.lambda() * v.derivative(x)};
}

enum class MapMode { deterministic, randomized };

inline const char* to_string(MapMode m) noexcept {
  return m == MapMode::deterministic ? "deterministic" : "randomized";
}

/// Initial phase points plus the seed that fixes every random stream.
/// Trajectory i draws its initial condition from stream 2i and its
/// randomized angles from stream 2i+1.
struct Ensemble {
  std::vector<PhasePoint> points;
  std::uint64_t seed = 0;

  /// All momenta equal to p0, angles uniform.
  static Ensemble delta(double p0, std::size_t count, std::uint64_t seed) {
    return band(p0, p0, count, seed);
  }

  /// Momenta uniform in [p_lo, p_hi], angles uniform.
  static Ensemble band(double p_lo, double p_hi, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("ensemble needs at least one trajectory");
    if (p_hi < p_lo) throw std::invalid_argument("ensemble band is empty");
    Ensemble e;
    e.seed = seed;
    e.points.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      StreamRng rng(seed, 2 * static_cast<std::uint64_t>(i));
      const double x = rng.angle();
      const double p = p_lo == p_hi ? p_lo : rng.uniform(p_lo, p_hi);
      e.points[i] = {x, p};
    }
    return e;
  }

  std::size_t size() const noexcept { return points.size(); }
};

struct EnsembleOptions {
  /// Jackknife blocks; trajectories are split into contiguous blocks.
  std::size_t blocks = 64;
  /// 0 = hardware concurrency. Results do not depend on this.
  unsigned threads = 0;
};

struct EnsembleFit {
  double friction = 0.0;
  double friction_se = 0.0;
  double diffusion = 0.0;
  double diffusion_se = 0.0;
  double residual = 0.0;
};

/// Ensemble moments <<p^k>>_N with jackknife errors.
class EnsembleRun {
 public:
  EnsembleRun(long steps, std::vector<std::size_t> block_counts,
              std::vector<std::vector<std::array<double, 4>>> block_sums)
      : steps_(steps), counts_(std::move(block_counts)), sums_(std::move(block_sums)) {
    total_count_ = 0;
    for (auto c : counts_) total_count_ += c;
    totals_.assign(static_cast<std::size_t>(steps_) + 1, {0, 0, 0, 0});
    for (std::size_t n = 0; n <= static_cast<std::size_t>(steps_); ++n)
      for (int k = 0; k < 4; ++k) {
        CompensatedSum s;
        for (const auto& b : sums_) s += b[n][static_cast<std::size_t>(k)];
        totals_[n][static_cast<std::size_t>(k)] = s.value();
      }
    moments_ = moments_excluding(blocks());
    std::vector<MomentTrajectory> loo;
    for (std::size_t b = 0; b < blocks(); ++b) loo.push_back(moments_excluding(b));
    se_.assign(static_cast<std::size_t>(steps_) + 1, {0, 0, 0, 0});
    for (std::size_t n = 0; n <= static_cast<std::size_t>(steps_); ++n)
      for (int k = 1; k <= 4; ++k) {
        std::vector<double> est;
        for (const auto& t : loo) est.push_back(t[n].moment(k));
        se_[n][static_cast<std::size_t>(k - 1)] = jackknife_error(est);
      }
    leave_one_out_ = std::move(loo);
  }

  long steps() const noexcept { return steps_; }
  std::size_t trajectories() const noexcept { return total_count_; }
  std::size_t blocks() const noexcept { return counts_.size(); }
  const MomentTrajectory& moments() const noexcept { return moments_; }
  /// Jackknife standard error of <<p^k>> at step n.
  double standard_error(long n, int k) const {
    return se_.at(static_cast<std::size_t>(n)).at(static_cast<std::size_t>(k - 1));
  }

  /// Jackknife estimate and error of any statistic of the moment trajectory.
  std::pair<double, double> jackknife(
      const std::function<double(const MomentTrajectory&)>& stat) const {
    std::vector<double> est;
    est.reserve(leave_one_out_.size());
    for (const auto& t : leave_one_out_) est.push_back(stat(t));
    return {stat(moments_), jackknife_error(est)};
  }

  /// F and D with jackknife errors, fitted over steps >= from_step.
  EnsembleFit fit(double period, long from_step = 0) const {
    const auto base = diffusion_fit(moments_, period, from_step);
    const auto f = jackknife([&](const MomentTrajectory& t) {
      return diffusion_fit(t, period, from_step).friction;
    });
    const auto d = jackknife([&](const MomentTrajectory& t) {
      return diffusion_fit(t, period, from_step).diffusion;
    });
    return {base.friction, f.second, base.diffusion, d.second, base.residual};
  }

 private:
  // Moments of all blocks except `skip` (skip == blocks() keeps them all).
  MomentTrajectory moments_excluding(std::size_t skip) const {
    MomentTrajectory t{{}, Provenance::ensemble};
    double count = static_cast<double>(total_count_);
    if (skip < blocks()) count -= static_cast<double>(counts_[skip]);
    t.records.reserve(static_cast<std::size_t>(steps_) + 1);
    for (std::size_t n = 0; n <= static_cast<std::size_t>(steps_); ++n) {
      std::array<double, 4> s = totals_[n];
      if (skip < blocks())
        for (std::size_t k = 0; k < 4; ++k) s[k] -= sums_[skip][n][k];
      t.records.push_back({static_cast<long>(n), s[0] / count, s[1] / count, s[2] / count,
                           s[3] / count, 0.0});
    }
    return t;
  }

  long steps_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::array<double, 4>>> sums_;  // [block][step][k-1]
  std::size_t total_count_ = 0;
  std::vector<std::array<double, 4>> totals_;
  MomentTrajectory moments_;
  std::vector<std::array<double, 4>> se_;
  std::vector<MomentTrajectory> leave_one_out_;
};

/// Runs every trajectory for `steps` steps. Trajectories are grouped into
/// fixed contiguous blocks; each block is reduced sequentially, so the result
/// is bit-identical for a given seed regardless of thread count.
inline EnsembleRun evolve_ensemble(const Ensemble& ens, const ModelParams& params,
                                   const Potential& v, long steps, MapMode mode,
                                   const EnsembleOptions& opt = {}) {
  if (steps < 1) throw std::invalid_argument("evolve_ensemble: steps must be >= 1");
  if (ens.points.empty()) throw std::invalid_argument("evolve_ensemble: empty ensemble");
  const std::size_t ntraj = ens.points.size();
  const std::size_t nblocks = std::clamp<std::size_t>(opt.blocks, 1, ntraj);
  const std::size_t nsteps = static_cast<std::size_t>(steps) + 1;
  std::vector<std::size_t> counts(nblocks);
  std::vector<std::vector<std::array<double, 4>>> sums(nblocks);

  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * ntraj / nblocks;
    const std::size_t hi = (b + 1) * ntraj / nblocks;
    counts[b] = hi - lo;
    std::vector<std::array<CompensatedSum, 4>> acc(nsteps);
    for (std::size_t i = lo; i < hi; ++i) {
      PhasePoint pt = ens.points[i];
      StreamRng rng(ens.seed, 2 * static_cast<std::uint64_t>(i) + 1);
      for (std::size_t n = 0; n < nsteps; ++n) {
        if (n > 0)
          pt = mode == MapMode::deterministic ? twist_step(pt, params, v)
                                              : randomized_step(pt, params, v, rng);
        const double p2 = pt.p * pt.p;
        acc[n][0] += pt.p;
        acc[n][1] += p2;
        acc[n][2] += p2 * pt.p;
        acc[n][3] += p2 * p2;
      }
    }
    sums[b].resize(nsteps);
    for (std::size_t n = 0; n < nsteps; ++n)
      for (std::size_t k = 0; k < 4; ++k) sums[b][n][k] = acc[n][k].value();
  };

  unsigned nthreads = opt.threads != 0 ? opt.threads : std::thread::hardware_concurrency();
  nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(nblocks)));
  if (nthreads == 1) {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < nblocks; b += nthreads) run_block(b);
      });
    for (auto& th : pool) th.join();
  }
  return EnsembleRun(steps, std::move(counts), std::move(sums));
}

}  // namespace kicked
