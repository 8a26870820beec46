// kicked-measure: command-line front end for the kicked-rotor experiments.
//
// Exit codes: 0 success, 1 I/O failure, 2 configuration error,
// 3 numeric tolerance failure, 4 lattice overflow.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kicked/harness.hpp"

namespace {

using kicked::harness::Regime;
using kicked::harness::RunConfig;

enum ExitCode { ok = 0, io_failure = 1, config_error = 2, tolerance_failure = 3, overflow = 4 };

// Flags as parsed; unset optionals leave the config-file or default value.
struct Flags {
  std::optional<double> lambda, hbar, period, tau, band_lo, band_hi;
  std::optional<long> steps, half_width, max_nu;
  std::optional<std::size_t> grid_points, trajectories;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> potential;
  std::string config, out, plot, manifest;
};

void add_run_options(CLI::App* sub, Flags& f, Regime regime) {
  sub->add_option("--config", f.config, "key=value file; explicit flags override it");
  sub->add_option("--lambda", f.lambda, "kick strength");
  sub->add_option("--hbar", f.hbar, "effective Planck constant");
  sub->add_option("--period", f.period, "kick period T");
  sub->add_option("--tau", f.tau, "kick time within the period (0 < tau < T)");
  sub->add_option("--steps", f.steps, "number of kicks");
  sub->add_option("--half-width", f.half_width, "momentum lattice half-width M");
  sub->add_option("--potential", f.potential, "cos | fourier:cos=a1,..;sin=b1,..");
  sub->add_option("--grid-points", f.grid_points, "angle quadrature points (power of two)");
  sub->add_option("--trajectories", f.trajectories, "classical ensemble size");
  sub->add_option("--seed", f.seed, "RNG seed (required for stochastic runs)");
  sub->add_option("--out", f.out, "CSV output path (stdout if omitted)");
  sub->add_option("--plot", f.plot, "SVG plot path");
  sub->add_option("--manifest", f.manifest, "JSON manifest path");
  if (regime == Regime::classical_deterministic || regime == Regime::regime_table) {
    sub->add_option("--band-lo", f.band_lo, "lower edge of the initial momentum band");
    sub->add_option("--band-hi", f.band_hi, "upper edge of the initial momentum band");
  }
  if (regime == Regime::kernel_compare)
    sub->add_option("--max-nu", f.max_nu, "largest |nu| tabulated");
}

RunConfig build_config(Regime regime, const Flags& f) {
  RunConfig c;
  c.regime = regime;
  if (!f.config.empty()) c.apply(kicked::io::read_config(f.config));
  if (f.lambda) c.lambda = *f.lambda;
  if (f.hbar) c.hbar = *f.hbar;
  if (f.period) c.period = *f.period;
  if (f.tau) c.tau = *f.tau;
  if (f.steps) c.steps = *f.steps;
  if (f.half_width) c.half_width = *f.half_width;
  if (f.potential) c.potential = *f.potential;
  if (f.grid_points) c.grid_points = *f.grid_points;
  if (f.trajectories) c.trajectories = *f.trajectories;
  if (f.seed) c.seed = *f.seed;
  if (f.band_lo) c.band_lo = *f.band_lo;
  if (f.band_hi) c.band_hi = *f.band_hi;
  if (f.max_nu) c.max_nu = *f.max_nu;
  c.out = f.out;
  c.plot = f.plot;
  c.manifest = f.manifest;
  return c;
}

void print_regime_table(const kicked::harness::RegimeOutput& out) {
  const auto& r = out.results;
  std::cerr << "D_theory = " << r["D_theory"].get<double>() << '\n';
  for (const auto& row : r["rows"])
    std::cerr << row["label"].get<std::string>() << "  " << row["regime"].get<std::string>()
              << ": rate = " << row["rate"].get<double>() << " +- "
              << row["rate_se"].get<double>() << "  -> " << row["verdict"].get<std::string>()
              << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kicked rotor with and without momentum measurements"};
  app.set_version_flag("--version", std::string(kicked::version));
  app.require_subcommand(1);

  Flags flags;
  std::optional<Regime> chosen;
  for (const auto& [name, regime] : kicked::harness::regime_names()) {
    auto* sub = app.add_subcommand(name, "run " + name);
    add_run_options(sub, flags, regime);
    sub->callback([&chosen, r = regime] { chosen = r; });
  }

  std::string plot_csv, plot_out, plot_kind = "auto";
  auto* plot = app.add_subcommand("plot", "render an SVG from an existing CSV");
  plot->add_option("--csv", plot_csv, "input CSV")->required();
  plot->add_option("--out", plot_out, "output SVG")->required();
  plot->add_option("--kind", plot_kind, "variance | kernel | auto")
      ->check(CLI::IsMember({"variance", "kernel", "auto"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (plot->parsed()) {
      const auto table = kicked::io::read_csv(plot_csv);
      if (plot_kind == "auto") plot_kind = table.has_column("w_quantum") ? "kernel" : "variance";
      kicked::io::write_text(plot_out, plot_kind == "kernel"
                                           ? kicked::io::plot_kernel_compare(table)
                                           : kicked::io::plot_variance(table));
      return ok;
    }
    const auto config = build_config(*chosen, flags);
    const auto out = kicked::harness::run(config);
    if (config.regime == Regime::regime_table) print_regime_table(out);
    return ok;
  } catch (const kicked::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const kicked::LatticeOverflow& e) {
    std::cerr << "lattice overflow: " << e.what() << " (need half_width >= "
              << e.required_half_width() << ")\n";
    return overflow;
  } catch (const kicked::ToleranceError& e) {
    std::cerr << "tolerance failure: " << e.what() << '\n';
    return tolerance_failure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_failure;
  }
}
