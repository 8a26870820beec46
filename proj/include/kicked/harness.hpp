#pragma once

// Experiment orchestration behind the kicked-measure CLI: one function per
// regime, each producing a CSV table and a JSON summary; run() writes the
// files, optional plots (rendered from the written CSV) and the manifest.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kicked/classical_maps.hpp"
#include "kicked/errors.hpp"
#include "kicked/io/config.hpp"
#include "kicked/io/csv.hpp"
#include "kicked/io/svg_plot.hpp"
#include "kicked/kernels.hpp"
#include "kicked/measured_evolution.hpp"
#include "kicked/model.hpp"
#include "kicked/unitary_evolution.hpp"
#include "kicked/version.hpp"

namespace kicked::harness {

using json = nlohmann::ordered_json;

enum class Regime {
  quantum_measured,
  quantum_unitary,
  classical_deterministic,
  classical_random,
  kernel_compare,
  moments_compare,
  regime_table,
};

inline const std::map<std::string, Regime>& regime_names() {
  static const std::map<std::string, Regime> names{
      {"simulate-quantum-measured", Regime::quantum_measured},
      {"simulate-quantum-unitary", Regime::quantum_unitary},
      {"simulate-classical-deterministic", Regime::classical_deterministic},
      {"simulate-classical-random", Regime::classical_random},
      {"kernel-compare", Regime::kernel_compare},
      {"moments-compare", Regime::moments_compare},
      {"regime-table", Regime::regime_table},
  };
  return names;
}

inline std::string to_string(Regime r) {
  for (const auto& [name, value] : regime_names())
    if (value == r) return name;
  return "?";
}

inline Regime parse_regime(const std::string& s) {
  auto it = regime_names().find(s);
  if (it == regime_names().end()) throw ConfigError("unknown regime '" + s + "'");
  return it->second;
}

inline constexpr long default_unitary_half_width = 4096;

struct RunConfig {
  Regime regime = Regime::quantum_measured;
  double lambda = 5.0;
  double hbar = 1.0;
  double period = 1.0;
  std::optional<double> tau;
  std::string potential = "cos";
  std::size_t grid_points = Potential::default_grid_points;
  long steps = 100;
  std::optional<long> half_width;
  std::size_t trajectories = 10000;
  std::optional<std::uint64_t> seed;
  // Initial momentum band of the deterministic-map ensemble.
  double band_lo = 0.0;
  double band_hi = 0.1;
  // kernel-compare covers nu in [-max_nu, max_nu]; default ceil(1.6 lambda/hbar).
  std::optional<long> max_nu;
  std::string out;
  std::string plot;
  std::string manifest;

  ModelParams params() const {
    return tau ? ModelParams(lambda, hbar, period, *tau) : ModelParams(lambda, hbar, period);
  }
  Potential make_potential() const { return io::parse_potential(potential, grid_points); }

  bool stochastic() const {
    return regime == Regime::classical_deterministic || regime == Regime::classical_random ||
           regime == Regime::regime_table;
  }

  /// Overlay values from a key=value file.
  void apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) {
      if (k == "lambda") lambda = io::parse_double(k, v);
      else if (k == "hbar") hbar = io::parse_double(k, v);
      else if (k == "period") period = io::parse_double(k, v);
      else if (k == "tau") tau = io::parse_double(k, v);
      else if (k == "potential") potential = v;
      else if (k == "half_width") half_width = io::parse_long(k, v);
      else if (k == "grid_points") grid_points = static_cast<std::size_t>(io::parse_long(k, v));
      else if (k == "seed") seed = static_cast<std::uint64_t>(io::parse_long(k, v));
      else if (k == "steps") steps = io::parse_long(k, v);
      else if (k == "trajectories") trajectories = static_cast<std::size_t>(io::parse_long(k, v));
      else throw ConfigError("unknown config key '" + k + "'");
    }
  }

  void validate() const {
    (void)params();
    (void)make_potential();
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (half_width && *half_width < 1) throw ConfigError("half_width must be >= 1");
    if (stochastic() && !seed) throw ConfigError("seed is required for " + to_string(regime));
    if ((regime == Regime::classical_deterministic || regime == Regime::classical_random ||
         regime == Regime::regime_table) &&
        trajectories < 2)
      throw ConfigError("trajectories must be >= 2");
    if (band_hi < band_lo) throw ConfigError("band_hi must be >= band_lo");
    if (max_nu && *max_nu < 1) throw ConfigError("max_nu must be >= 1");
    if (regime == Regime::kernel_compare && !(lambda > 0.0))
      throw ConfigError("kernel-compare needs lambda > 0");
    if (!plot.empty() && (regime == Regime::moments_compare || regime == Regime::regime_table))
      throw ConfigError(to_string(regime) + " has no plot");
    if (!plot.empty() && out.empty())
      throw ConfigError("--plot needs --out (plots are rendered from the CSV)");
  }
};

/// CSV table plus structured results of one regime run.
struct RegimeOutput {
  explicit RegimeOutput(io::CsvWriter table) : csv(std::move(table)) {}

  io::CsvWriter csv;
  json results = json::object();
  std::vector<std::string> warnings;
  enum class PlotKind { variance, kernel, none } plot_kind = PlotKind::none;
};

namespace detail {

inline std::vector<std::pair<std::string, std::string>> base_meta(const RunConfig& c,
                                                                  const Potential& v) {
  const auto p = c.params();
  std::vector<std::pair<std::string, std::string>> m{
      {"generator", std::string("kicked-measure ") + version},
      {"regime", to_string(c.regime)},
      {"lambda", io::format_number(p.lambda())},
      {"hbar", io::format_number(p.hbar())},
      {"period", io::format_number(p.period())},
      {"tau", io::format_number(p.tau())},
      {"potential", v.name()},
      {"grid_points", std::to_string(v.grid_points())},
      {"steps", std::to_string(c.steps)},
  };
  if (c.seed) m.emplace_back("seed", std::to_string(*c.seed));
  return m;
}

inline json fit_json(const DiffusionFit& f) {
  return {{"F", f.friction}, {"D", f.diffusion}, {"residual", f.residual}};
}

inline json fit_json(const EnsembleFit& f) {
  return {{"F", f.friction},
          {"F_se", f.friction_se},
          {"D", f.diffusion},
          {"D_se", f.diffusion_se},
          {"residual", f.residual}};
}

inline double theory_diffusion(const ModelParams& p, const Potential& v) {
  return p.lambda() * p.lambda() * force_moment(v, 2) / p.period();
}

}  // namespace detail

/// Quantum kicks with a momentum measurement after each: master equation from
/// the eigenstate n = 0 on an auto-sized (or given) lattice.
struct MeasuredSimulation {
  TransitionKernel kernel;
  long half_width;
  MeasuredRun run;
  DiffusionFit fit;
};

inline MeasuredSimulation simulate_quantum_measured(const ModelParams& params, const Potential& v,
                                                    long steps,
                                                    std::optional<long> half_width = {}) {
  auto kernel = adaptive_quantum_kernel(params, v);
  const long m = half_width.value_or(diffusive_half_width(
      0, steps, params.lambda(), force_moment(v, 2), params.hbar(), kernel.max_order()));
  auto run = evolve_measured(MomentumDistribution::delta(m, 0), kernel, steps);
  const auto fit = steps >= 9 ? diffusion_fit(run.trajectory, params.period()) : DiffusionFit{};
  return {std::move(kernel), m, std::move(run), fit};
}

inline RegimeOutput quantum_measured(const RunConfig& c) {
  const auto p = c.params();
  const auto v = c.make_potential();
  const auto sim = simulate_quantum_measured(p, v, c.steps, c.half_width);
  auto meta = detail::base_meta(c, v);
  meta.emplace_back("half_width", std::to_string(sim.half_width));
  meta.emplace_back("kernel_order", std::to_string(sim.kernel.max_order()));
  meta.emplace_back("kernel_tail_mass", io::format_number(sim.kernel.tail_mass()));
  meta.emplace_back("D_theory", io::format_number(detail::theory_diffusion(p, v)));
  RegimeOutput out{io::CsvWriter(meta, {"step", "p1", "p2", "p3", "p4", "var", "tail_mass"})};
  for (const auto& r : sim.run.trajectory.records)
    out.csv.add_row({static_cast<double>(r.step), r.p1, r.p2, r.p3, r.p4, r.variance(),
                     r.tail_mass});
  out.results["half_width"] = sim.half_width;
  out.results["kernel_order"] = sim.kernel.max_order();
  out.results["kernel_tail_mass"] = sim.kernel.tail_mass();
  out.results["D_theory"] = detail::theory_diffusion(p, v);
  if (c.steps >= 9) out.results["fit"] = detail::fit_json(sim.fit);
  out.results["final_tail_mass"] = sim.run.trajectory.back().tail_mass;
  out.plot_kind = RegimeOutput::PlotKind::variance;
  return out;
}

inline RegimeOutput quantum_unitary(const RunConfig& c) {
  const auto p = c.params();
  const auto v = c.make_potential();
  const long m = c.half_width.value_or(default_unitary_half_width);
  auto run = evolve_unitary(WaveFunction::eigenstate(m, 0), p, v, c.steps);
  auto meta = detail::base_meta(c, v);
  meta.emplace_back("half_width", std::to_string(m));
  meta.emplace_back("D_theory", io::format_number(detail::theory_diffusion(p, v)));
  RegimeOutput out{
      io::CsvWriter(meta, {"step", "p1", "p2", "p3", "p4", "var", "tail_mass", "norm_loss"})};
  for (const auto& r : run.trajectory.records)
    out.csv.add_row({static_cast<double>(r.step), r.p1, r.p2, r.p3, r.p4, r.variance(),
                     r.tail_mass, r.tail_mass});
  if (auto w = resonance_warning(p)) out.warnings.push_back(*w);
  out.results["half_width"] = m;
  out.results["final_p2"] = run.trajectory.back().p2;
  out.results["measured_chain_p2"] =
      detail::theory_diffusion(p, v) * p.period() * static_cast<double>(c.steps);
  out.results["norm_loss"] = run.trajectory.back().tail_mass;
  out.plot_kind = RegimeOutput::PlotKind::variance;
  return out;
}

inline RegimeOutput classical(const RunConfig& c, MapMode mode) {
  const auto p = c.params();
  const auto v = c.make_potential();
  const auto ens = mode == MapMode::deterministic
                       ? Ensemble::band(c.band_lo, c.band_hi, c.trajectories, *c.seed)
                       : Ensemble::delta(0.0, c.trajectories, *c.seed);
  const auto run = evolve_ensemble(ens, p, v, c.steps, mode);
  auto meta = detail::base_meta(c, v);
  meta.emplace_back("mode", to_string(mode));
  meta.emplace_back("trajectories", std::to_string(c.trajectories));
  if (mode == MapMode::deterministic) {
    meta.emplace_back("band_lo", io::format_number(c.band_lo));
    meta.emplace_back("band_hi", io::format_number(c.band_hi));
  }
  meta.emplace_back("D_theory", io::format_number(detail::theory_diffusion(p, v)));
  RegimeOutput out{io::CsvWriter(
      meta, {"step", "p1", "p1_se", "p2", "p2_se", "p3", "p3_se", "p4", "p4_se"})};
  for (const auto& r : run.moments().records)
    out.csv.add_row({static_cast<double>(r.step), r.p1, run.standard_error(r.step, 1), r.p2,
                     run.standard_error(r.step, 2), r.p3, run.standard_error(r.step, 3), r.p4,
                     run.standard_error(r.step, 4)});
  out.results["trajectories"] = c.trajectories;
  out.results["D_theory"] = detail::theory_diffusion(p, v);
  if (c.steps >= 9) {
    // Deterministic maps are fitted over the second half, after phase mixing.
    const long from = mode == MapMode::deterministic ? c.steps / 2 : 0;
    if (c.steps - from >= 9) {
      out.results["fit"] = detail::fit_json(run.fit(p.period(), from));
      out.results["fit_from_step"] = from;
    }
  }
  out.plot_kind = RegimeOutput::PlotKind::variance;
  return out;
}

/// Exact, classical and semiclassical one-step densities (in units of
/// 1/momentum) for nu in [-R, R]. The classical column is the cell average
/// of W_cl over [hbar(nu - 1/2), hbar(nu + 1/2)], finite at the edges.
inline RegimeOutput kernel_compare(const RunConfig& c) {
  const auto p = c.params();
  const auto v = c.make_potential();
  if (!(v.is_even() && v.harmonics() == 1 && v.cos_coeffs()[0] == 1.0))
    throw ConfigError("kernel-compare needs potential=cos (closed-form classical kernel)");
  const double z = p.kick_argument();
  const long range = c.max_nu.value_or(static_cast<long>(std::ceil(1.6 * z)));
  const auto adaptive = adaptive_quantum_kernel(p, v);
  const long order = std::max(range, adaptive.max_order());
  const auto kernel = quantum_kernel(p, kernel_grid(v, order), order);
  auto meta = detail::base_meta(c, v);
  meta.emplace_back("max_nu", std::to_string(range));
  RegimeOutput out{io::CsvWriter(meta, {"nu", "delta_p", "w_quantum", "w_classical",
                                        "w_semiclassical_osc", "w_semiclassical_tail"})};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double h = p.hbar();
  const double lambda = p.lambda();
  CompensatedSum q_sum, c_sum;
  for (long nu = -range; nu <= range; ++nu) {
    const double dp = h * static_cast<double>(nu);
    const double wq = kernel.density(nu);
    const double wc = classical_kernel_cell_average(nu, h, lambda);
    const double osc = std::abs(dp) < lambda ? semiclassical_oscillatory(dp, p) : nan;
    const double tail = std::abs(dp) > lambda ? semiclassical_tail(dp, p) : nan;
    q_sum += wq * h;
    c_sum += wc * h;
    out.csv.add_row({static_cast<double>(nu), dp, wq, wc, osc, tail});
  }
  out.results["max_nu"] = range;
  out.results["quantum_mass"] = q_sum.value();
  out.results["classical_mass"] = c_sum.value();
  out.plot_kind = RegimeOutput::PlotKind::kernel;
  return out;
}

/// Quantum-minus-classical moment differences.
struct MomentsComparison {
  std::vector<std::array<double, 4>> differences;  // per step, k = 1..4
  double predicted_step_gap = 0.0;                 // lambda^2 hbar^2 <(f')^2>
  std::array<double, 4> max_abs_difference{};      // over steps
  double max_gap_error = 0.0;  // max_N |d4_N - d4_0 - N * predicted_step_gap|
};

inline MomentsComparison compare_moments(const MomentTrajectory& quantum,
                                         const MomentTrajectory& classical,
                                         double predicted_step_gap) {
  if (quantum.size() != classical.size())
    throw std::invalid_argument("moments-compare: trajectories have different lengths");
  MomentsComparison cmp;
  cmp.predicted_step_gap = predicted_step_gap;
  for (std::size_t i = 0; i < quantum.size(); ++i) {
    std::array<double, 4> d{};
    for (int k = 1; k <= 4; ++k) {
      d[static_cast<std::size_t>(k - 1)] = quantum[i].moment(k) - classical[i].moment(k);
      cmp.max_abs_difference[static_cast<std::size_t>(k - 1)] =
          std::max(cmp.max_abs_difference[static_cast<std::size_t>(k - 1)],
                   std::abs(d[static_cast<std::size_t>(k - 1)]));
    }
    cmp.differences.push_back(d);
    const double expected =
        cmp.differences.front()[3] + static_cast<double>(quantum[i].step) * predicted_step_gap;
    cmp.max_gap_error = std::max(cmp.max_gap_error, std::abs(d[3] - expected));
  }
  return cmp;
}

inline double fourth_moment_step_gap(const ModelParams& p, const Potential& v) {
  return p.lambda() * p.lambda() * p.hbar() * p.hbar() * force_derivative_moment(v);
}

/// Simulated quantum-measured moments against the randomized-classical
/// recursion from the same delta start.
inline RegimeOutput moments_compare(const RunConfig& c) {
  const auto p = c.params();
  const auto v = c.make_potential();
  const auto sim = simulate_quantum_measured(p, v, c.steps, c.half_width);
  const auto cl = moment_recursion(p, v, {0, 0, 0, 0}, c.steps, RecursionBranch::classical);
  const double gap = fourth_moment_step_gap(p, v);
  const auto cmp = compare_moments(sim.run.trajectory, cl, gap);
  auto meta = detail::base_meta(c, v);
  meta.emplace_back("predicted_step_gap_p4", io::format_number(gap));
  RegimeOutput out{io::CsvWriter(meta, {"step", "d1", "d2", "d3", "d4", "d4_predicted"})};
  for (std::size_t i = 0; i < cmp.differences.size(); ++i) {
    const auto& d = cmp.differences[i];
    out.csv.add_row({static_cast<double>(i), d[0], d[1], d[2], d[3],
                     gap * static_cast<double>(i)});
  }
  out.results["predicted_step_gap_p4"] = gap;
  out.results["max_abs_d1"] = cmp.max_abs_difference[0];
  out.results["max_abs_d2"] = cmp.max_abs_difference[1];
  out.results["max_abs_d3"] = cmp.max_abs_difference[2];
  out.results["max_gap_error_p4"] = cmp.max_gap_error;
  return out;
}

/// One row of the classical-vs-quantum diffusion table.
struct RegimeRow {
  std::string label;  // A..D
  std::string name;
  double rate = 0.0;     // fitted D (unitary: late-window slope / T)
  double rate_se = 0.0;  // jackknife error, 0 for exact runs
  bool diffusive = false;
  std::string verdict;
};

struct RegimeTable {
  double theory = 0.0;  // lambda^2 <f^2> / T
  std::vector<RegimeRow> rows;
};

/// Runs all four regimes with the same parameters.
inline RegimeTable regime_table(const RunConfig& c) {
  const auto p = c.params();
  const auto v = c.make_potential();
  RegimeTable t;
  t.theory = detail::theory_diffusion(p, v);
  const long steps = std::max(c.steps, 20L);
  {
    const auto ens = Ensemble::band(c.band_lo, c.band_hi, c.trajectories, *c.seed);
    const auto run = evolve_ensemble(ens, p, v, steps, MapMode::deterministic);
    const auto f = run.fit(p.period(), steps / 2);
    const bool grows = f.diffusion > 3.0 * f.diffusion_se && f.diffusion > 0.0;
    t.rows.push_back({"A", "classical", f.diffusion, f.diffusion_se, grows,
                      grows ? "diffusion" : "bounded"});
  }
  {
    const long m = c.half_width.value_or(default_unitary_half_width);
    const auto run = evolve_unitary(WaveFunction::eigenstate(m, 0), p, v, steps);
    std::vector<double> tt, var;
    for (const auto& r : run.trajectory.records)
      if (r.step >= steps - steps / 4) {
        tt.push_back(static_cast<double>(r.step) * p.period());
        var.push_back(r.variance());
      }
    const double slope = fit_line(tt, var).slope;
    const double chain = t.theory * p.period() * static_cast<double>(steps);
    const bool saturating =
        run.trajectory.back().variance() < 0.25 * chain && slope < 0.05 * t.theory;
    t.rows.push_back({"B", "quantum", slope, 0.0, !saturating,
                      saturating ? "no diffusion (saturated)" : "growing"});
  }
  {
    const auto sim = simulate_quantum_measured(p, v, steps, std::nullopt);
    t.rows.push_back({"C", "quantum + measurements", sim.fit.diffusion, 0.0,
                      sim.fit.diffusion > 0.0, "diffusion"});
  }
  {
    const auto ens = Ensemble::delta(0.0, c.trajectories, *c.seed);
    const auto run = evolve_ensemble(ens, p, v, steps, MapMode::randomized);
    const auto f = run.fit(p.period());
    const bool grows = f.diffusion > 3.0 * f.diffusion_se;
    t.rows.push_back({"D", "classical + random", f.diffusion, f.diffusion_se, grows,
                      grows ? "diffusion" : "bounded"});
  }
  return t;
}

inline RegimeOutput regime_table_output(const RunConfig& c) {
  const auto v = c.make_potential();
  const auto t = regime_table(c);
  auto meta = detail::base_meta(c, v);
  meta.emplace_back("trajectories", std::to_string(c.trajectories));
  meta.emplace_back("regimes", "1=A classical,2=B quantum,3=C quantum+measurements,"
                               "4=D classical+random");
  meta.emplace_back("D_theory", io::format_number(t.theory));
  RegimeOutput out{io::CsvWriter(meta, {"regime", "rate", "rate_se", "diffusive"})};
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    out.csv.add_row({static_cast<double>(i + 1), r.rate, r.rate_se, r.diffusive ? 1.0 : 0.0});
    rows.push_back({{"label", r.label},
                    {"regime", r.name},
                    {"rate", r.rate},
                    {"rate_se", r.rate_se},
                    {"verdict", r.verdict}});
  }
  out.results["D_theory"] = t.theory;
  out.results["rows"] = rows;
  return out;
}

inline RegimeOutput run_regime(const RunConfig& c) {
  switch (c.regime) {
    case Regime::quantum_measured: return quantum_measured(c);
    case Regime::quantum_unitary: return quantum_unitary(c);
    case Regime::classical_deterministic: return classical(c, MapMode::deterministic);
    case Regime::classical_random: return classical(c, MapMode::randomized);
    case Regime::kernel_compare: return kernel_compare(c);
    case Regime::moments_compare: return moments_compare(c);
    case Regime::regime_table: return regime_table_output(c);
  }
  throw ConfigError("unknown regime");
}

inline json manifest(const RunConfig& c, const RegimeOutput& out) {
  const auto p = c.params();
  json m;
  m["generator"] = "kicked-measure";
  m["version"] = version;
  m["regime"] = to_string(c.regime);
  m["parameters"] = {{"lambda", p.lambda()},   {"hbar", p.hbar()},
                     {"period", p.period()},   {"tau", p.tau()},
                     {"potential", c.potential}, {"grid_points", c.grid_points},
                     {"steps", c.steps},       {"trajectories", c.trajectories},
                     {"band_lo", c.band_lo},   {"band_hi", c.band_hi}};
  if (c.half_width) m["parameters"]["half_width"] = *c.half_width;
  if (c.max_nu) m["parameters"]["max_nu"] = *c.max_nu;
  m["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  m["tolerances"] = {{"lattice_tail_mass", default_lattice_tolerance},
                     {"kernel_tail_mass", KernelOptions{}.tail_tolerance},
                     {"kernel_adaptive_target", KernelOptions{}.adaptive_target},
                     {"unitary_norm_loss", default_norm_tolerance},
                     {"quadrature_convergence", 1e-10}};
  m["results"] = out.results;
  m["warnings"] = out.warnings;
  m["outputs"] = {{"csv", c.out}, {"plot", c.plot}};
  return m;
}

inline std::string render_plot(const io::CsvTable& table, RegimeOutput::PlotKind kind) {
  switch (kind) {
    case RegimeOutput::PlotKind::variance: return io::plot_variance(table);
    case RegimeOutput::PlotKind::kernel: return io::plot_kernel_compare(table);
    case RegimeOutput::PlotKind::none: break;
  }
  throw ConfigError("this regime has no plot");
}

/// Runs one experiment and writes its artifacts. CSV goes to c.out, or to
/// `log` when no path is given.
inline RegimeOutput run(const RunConfig& c, std::ostream& log = std::cout) {
  c.validate();
  auto out = run_regime(c);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  if (c.out.empty()) {
    log << out.csv.str();
  } else {
    out.csv.write(c.out);
  }
  if (!c.plot.empty()) {
    if (c.out.empty()) throw ConfigError("--plot needs --out (plots are rendered from the CSV)");
    io::write_text(c.plot, render_plot(io::read_csv(c.out), out.plot_kind));
  }
  if (!c.manifest.empty()) io::write_text(c.manifest, manifest(c, out).dump(2) + "\n");
  return out;
}

}  // namespace kicked::harness
