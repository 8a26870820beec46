#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kicked/harness.hpp"

using namespace kicked;
using namespace kicked::harness;

namespace {

RunConfig base(Regime r) {
  RunConfig c;
  c.regime = r;
  c.steps = 20;
  c.seed = 5;
  c.trajectories = 2000;
  return c;
}

io::CsvTable table_of(const RegimeOutput& out) {
  std::istringstream in(out.csv.str());
  return io::parse_csv(in);
}

}  // namespace

TEST(RunConfig, ValidationRules) {
  auto c = base(Regime::classical_random);
  c.seed.reset();
  EXPECT_THROW(c.validate(), ConfigError);
  c = base(Regime::quantum_measured);
  c.seed.reset();
  EXPECT_NO_THROW(c.validate());
  c.steps = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base(Regime::quantum_measured);
  c.hbar = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base(Regime::moments_compare);
  c.plot = "x.svg";
  c.out = "x.csv";
  EXPECT_THROW(c.validate(), ConfigError);
  c = base(Regime::quantum_measured);
  c.plot = "x.svg";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, ApplyFileValues) {
  RunConfig c;
  c.apply({{"lambda", "2"}, {"tau", "0.25"}, {"potential", "fourier:cos=1,0.3"}, {"seed", "9"}});
  EXPECT_EQ(c.lambda, 2.0);
  EXPECT_EQ(c.params().tau(), 0.25);
  EXPECT_EQ(*c.seed, 9u);
  EXPECT_EQ(c.make_potential().harmonics(), 2u);
  EXPECT_THROW(c.apply({{"bogus", "1"}}), ConfigError);
}

TEST(Regimes, NamesRoundTrip) {
  for (const auto& [name, r] : regime_names()) EXPECT_EQ(parse_regime(to_string(r)), r);
  EXPECT_THROW(parse_regime("simulate"), ConfigError);
}

TEST(QuantumMeasured, CsvSchemaAndDiffusion) {
  const auto out = quantum_measured(base(Regime::quantum_measured));
  const auto t = table_of(out);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"step", "p1", "p2", "p3", "p4", "var", "tail_mass"}));
  EXPECT_EQ(t.rows.size(), 21u);
  EXPECT_NEAR(t.column("var").back(), 12.5 * 20, 1e-9);
  EXPECT_NEAR(out.results["fit"]["D"].get<double>(), 12.5, 1e-9);
  EXPECT_NEAR(out.results["fit"]["F"].get<double>(), 0.0, 1e-9);
}

TEST(QuantumUnitary, HasNormLossColumn) {
  auto c = base(Regime::quantum_unitary);
  c.half_width = 256;
  const auto t = table_of(quantum_unitary(c));
  EXPECT_TRUE(t.has_column("norm_loss"));
  EXPECT_NEAR(t.column("p2")[1], 12.5, 1e-10);
}

TEST(Classical, SchemaAndByteReproducibility) {
  const auto c = base(Regime::classical_random);
  const auto a = classical(c, MapMode::randomized);
  const auto b = classical(c, MapMode::randomized);
  EXPECT_EQ(a.csv.str(), b.csv.str());
  const auto t = table_of(a);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"step", "p1", "p1_se", "p2", "p2_se", "p3",
                                                  "p3_se", "p4", "p4_se"}));
  auto other = c;
  other.seed = 6;
  EXPECT_NE(classical(other, MapMode::randomized).csv.str(), a.csv.str());
}

TEST(KernelCompare, ColumnsNormalizedAndDomainsRespected) {
  auto c = base(Regime::kernel_compare);
  c.lambda = 100.0;
  const auto out = kernel_compare(c);
  EXPECT_NEAR(out.results["quantum_mass"].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(out.results["classical_mass"].get<double>(), 1.0, 1e-10);
  const auto t = table_of(out);
  const auto dp = t.column("delta_p");
  const auto osc = t.column("w_semiclassical_osc");
  const auto tail = t.column("w_semiclassical_tail");
  for (std::size_t i = 0; i < dp.size(); ++i) {
    EXPECT_EQ(std::isnan(osc[i]), std::abs(dp[i]) >= 100.0);
    EXPECT_EQ(std::isnan(tail[i]), std::abs(dp[i]) <= 100.0);
  }
  c.potential = "fourier:cos=1;sin=0,0.3";
  EXPECT_THROW(kernel_compare(c), ConfigError);
}

TEST(MomentsCompare, PredictedGapAndHbarScaling) {
  auto c = base(Regime::moments_compare);
  const auto out = moments_compare(c);
  EXPECT_NEAR(out.results["predicted_step_gap_p4"].get<double>(), 12.5, 1e-12);
  EXPECT_LT(out.results["max_gap_error_p4"].get<double>(), 1e-8 * 12.5 * 20 * 20 * 20);
  c.hbar = 0.5;
  const auto half = moments_compare(c);
  EXPECT_NEAR(half.results["predicted_step_gap_p4"].get<double>(), 12.5 / 4.0, 1e-12);
}

TEST(MomentsCompare, MismatchedLengthsRaise) {
  MomentTrajectory a, b;
  a.records.resize(3);
  b.records.resize(4);
  EXPECT_THROW(compare_moments(a, b, 1.0), std::invalid_argument);
}

TEST(Manifest, RecordsParametersSeedAndFit) {
  auto c = base(Regime::classical_random);
  const auto out = classical(c, MapMode::randomized);
  const auto m = manifest(c, out);
  EXPECT_EQ(m["seed"].get<std::uint64_t>(), 5u);
  EXPECT_EQ(m["parameters"]["lambda"].get<double>(), 5.0);
  EXPECT_TRUE(m["results"]["fit"].contains("D"));
  EXPECT_TRUE(m["results"]["fit"].contains("F"));
  EXPECT_TRUE(m.contains("tolerances"));
  EXPECT_EQ(m["version"].get<std::string>(), version);
}
