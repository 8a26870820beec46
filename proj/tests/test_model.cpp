#include <gtest/gtest.h>

#include <cmath>

#include "kicked/errors.hpp"
#include "kicked/model.hpp"

using namespace kicked;

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(ModelParams(0.0, 1.0, 1.0));
  EXPECT_THROW(ModelParams(-1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(ModelParams(1.0, 0.0, 1.0), ConfigError);
  EXPECT_THROW(ModelParams(1.0, 1.0, -2.0), ConfigError);
  EXPECT_THROW(ModelParams(1.0, 1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(ModelParams(1.0, 1.0, 1.0, 0.0), ConfigError);
  const ModelParams p(5.0, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(p.tau(), 1.0);
  EXPECT_DOUBLE_EQ(p.kick_argument(), 10.0);
  EXPECT_DOUBLE_EQ(p.with_hbar(1.0).kick_argument(), 5.0);
}

TEST(Potential, CosineValues) {
  const auto v = Potential::cosine();
  EXPECT_TRUE(v.is_even());
  for (double x : {-3.0, -1.0, 0.0, 0.4, 2.9}) {
    EXPECT_NEAR(v.value(x), std::cos(x), 1e-15);
    EXPECT_NEAR(v.force(x), std::sin(x), 1e-15);
    EXPECT_NEAR(v.force_derivative(x), std::cos(x), 1e-15);
  }
  EXPECT_NEAR(v.max_abs_force(), 1.0, 1e-6);
}

TEST(Potential, FourierHarmonicsAndParity) {
  const auto even = Potential::fourier({1.0, 0.3}, {});
  const auto odd = Potential::fourier({1.0}, {0.0, 0.3});
  EXPECT_TRUE(even.is_even());
  EXPECT_FALSE(odd.is_even());
  EXPECT_NEAR(odd.value(0.7), std::cos(0.7) + 0.3 * std::sin(1.4), 1e-15);
  EXPECT_NEAR(odd.derivative(0.7), -std::sin(0.7) + 0.6 * std::cos(1.4), 1e-15);
}

TEST(Potential, SampledRecoversSeries) {
  const auto v = Potential::sampled([](double x) { return std::cos(x) + 0.25 * std::sin(3 * x); }, 256);
  EXPECT_NEAR(v.value(1.1), std::cos(1.1) + 0.25 * std::sin(3.3), 1e-12);
  ASSERT_GE(v.harmonics(), 3u);
  EXPECT_NEAR(v.cos_coeffs()[0], 1.0, 1e-12);
  EXPECT_NEAR(v.sin_coeffs()[2], 0.25, 1e-12);
}

TEST(Potential, SampledRejectsNonPeriodicAndUnresolved) {
  EXPECT_THROW(Potential::sampled([](double x) { return x; }, 256), ConfigError);
  EXPECT_THROW(Potential::sampled([](double x) { return std::abs(x); }, 64), ResolutionError);
}

TEST(Potential, GridValidation) {
  EXPECT_THROW(Potential::cosine(1000), ConfigError);
  EXPECT_THROW(Potential::fourier(std::vector<double>(10, 1.0), {}, 32), ResolutionError);
}

// Oracles: exact angle averages of sin^k and of (sin x - 0.6 cos 2x)^k,
// confirmed by adaptive quadrature at 30 digits.
TEST(ForceMoments, CosinePotential) {
  const auto v = Potential::cosine();
  EXPECT_NEAR(force_moment(v, 1), 0.0, 1e-15);
  EXPECT_NEAR(force_moment(v, 2), 0.5, 1e-15);
  EXPECT_NEAR(force_moment(v, 3), 0.0, 1e-15);
  EXPECT_NEAR(force_moment(v, 4), 0.375, 1e-15);
  EXPECT_NEAR(force_derivative_moment(v), 0.5, 1e-15);
}

TEST(ForceMoments, AsymmetricPotential) {
  const auto v = Potential::fourier({1.0}, {0.0, 0.3});
  EXPECT_NEAR(force_moment(v, 2), 0.68, 1e-14);
  EXPECT_NEAR(force_moment(v, 3), 0.45, 1e-14);
  EXPECT_NEAR(force_moment(v, 4), 0.9636, 1e-14);
  EXPECT_NEAR(force_derivative_moment(v), 1.22, 1e-14);
  EXPECT_THROW(force_moment(v, 5), std::invalid_argument);
}

TEST(ForceMoments, EvenPotentialHasNoOddMoments) {
  const auto v = Potential::fourier({1.0, 0.3}, {});
  EXPECT_NEAR(force_moment(v, 3), 0.0, 1e-15);
  EXPECT_NEAR(force_moment(v, 2), 0.68, 1e-14);
}

TEST(MomentumDistribution, Constructors) {
  const auto d = MomentumDistribution::delta(5, -2);
  EXPECT_EQ(d.size(), 11u);
  EXPECT_EQ(d.at(-2), 1.0);
  EXPECT_EQ(d.at(7), 0.0);
  EXPECT_THROW(MomentumDistribution::delta(5, 6), ConfigError);
  const auto u = MomentumDistribution::uniform(5, -1, 2);
  EXPECT_NEAR(u.total(), 1.0, 1e-15);
  EXPECT_NEAR(u.at(0), 0.25, 1e-15);
  EXPECT_THROW(MomentumDistribution::from_probs(1, {0.5, 0.5, 0.5}), ConfigError);
  EXPECT_THROW(MomentumDistribution::from_probs(1, {1.5, -0.5, 0.0}), ConfigError);
}

TEST(MomentumDistribution, Moments) {
  const auto u = MomentumDistribution::uniform(5, -1, 2);
  EXPECT_NEAR(momentum_moment(u, 1.0, 1), 0.5, 1e-15);
  EXPECT_NEAR(momentum_moment(u, 1.0, 2), 1.5, 1e-15);
  EXPECT_NEAR(momentum_moment(u, 2.0, 2), 6.0, 1e-14);
  EXPECT_NEAR(momentum_moment(u, 1.0, 3), 2.0, 1e-15);
  EXPECT_NEAR(momentum_moment(u, 1.0, 4), 4.5, 1e-15);
  EXPECT_NEAR(momentum_moment(u, 1.0, 0), 1.0, 1e-15);
}
