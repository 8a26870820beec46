#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kicked/errors.hpp"
#include "kicked/io/config.hpp"
#include "kicked/io/csv.hpp"
#include "kicked/io/svg_plot.hpp"

using namespace kicked;

TEST(Csv, RoundTripIsExact) {
  io::CsvWriter w({{"lambda", "5"}, {"note", "x=y"}}, {"step", "value"});
  w.add_row({0, 0.1});
  w.add_row({1, 1.0 / 3.0});
  w.add_row({2, std::nan("")});
  EXPECT_THROW(w.add_row({1.0}), std::invalid_argument);
  std::istringstream in(w.str());
  const auto t = io::parse_csv(in);
  EXPECT_EQ(t.meta.at("lambda"), "5");
  EXPECT_EQ(t.meta.at("note"), "x=y");
  EXPECT_DOUBLE_EQ(t.meta_number("lambda"), 5.0);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.column("value")[1], 1.0 / 3.0);
  EXPECT_TRUE(std::isnan(t.column("value")[2]));
  EXPECT_THROW(t.column("missing"), std::out_of_range);
}

TEST(Csv, HeaderStartsWithMetadata) {
  io::CsvWriter w({{"a", "1"}}, {"x"});
  EXPECT_EQ(w.str(), "# a=1\nx\n");
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
  std::istringstream in("# comment\nlambda = 2.5\n\n  hbar=0.5  # trailing\nseed=7\n");
  const auto kv = io::parse_config(in);
  EXPECT_EQ(kv.at("lambda"), "2.5");
  EXPECT_EQ(kv.at("hbar"), "0.5");
  EXPECT_EQ(kv.at("seed"), "7");
}

TEST(Config, RejectsUnknownKeysAndMalformedLines) {
  std::istringstream bad_key("lamda=1\n");
  try {
    io::parse_config(bad_key);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lamda"), std::string::npos);
  }
  std::istringstream no_eq("lambda 1\n");
  EXPECT_THROW(io::parse_config(no_eq), ConfigError);
  std::istringstream empty("lambda=\n");
  EXPECT_THROW(io::parse_config(empty), ConfigError);
  EXPECT_THROW(io::parse_double("lambda", "1.5x"), ConfigError);
  EXPECT_THROW(io::parse_long("steps", "2.5"), ConfigError);
}

TEST(Config, PotentialSpecifications) {
  EXPECT_TRUE(io::parse_potential("cos", 256).is_even());
  const auto v = io::parse_potential("fourier:cos=1;sin=0,0.3", 256);
  EXPECT_NEAR(v.value(0.5), std::cos(0.5) + 0.3 * std::sin(1.0), 1e-15);
  EXPECT_THROW(io::parse_potential("sin", 256), ConfigError);
  EXPECT_THROW(io::parse_potential("fourier:tan=1", 256), ConfigError);
  EXPECT_THROW(io::parse_potential("fourier:", 256), ConfigError);
}

TEST(Svg, VariancePlotFromCsv) {
  std::istringstream in("# D_theory=2\n# period=1\nstep,p1,p2\n0,0,0\n1,0,2\n2,0,4\n");
  const auto svg = io::plot_variance(io::parse_csv(in));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("D N T"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, KernelPlotSkipsNan) {
  std::istringstream in(
      "nu,delta_p,w_quantum,w_classical,w_semiclassical_osc,w_semiclassical_tail\n"
      "-1,-1,0.2,0.3,0.25,nan\n0,0,0.5,0.3,0.3,nan\n1,1,0.2,0.3,nan,0.1\n");
  const auto svg = io::plot_kernel_compare(io::parse_csv(in));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
}
