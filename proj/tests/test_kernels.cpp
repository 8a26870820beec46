#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "kicked/bessel.hpp"
#include "kicked/errors.hpp"
#include "kicked/kernels.hpp"

using namespace kicked;

namespace {

std::complex<double> minus_i_pow(long nu) {
  static const std::complex<double> cycle[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return cycle[((nu % 4) + 4) % 4];
}

}  // namespace

TEST(KickAmplitudes, CosinePhaseIsMinusIToTheNu) {
  // Reference J_nu(5) at 22 digits.
  const double j5[] = {-0.1775967713143383043474, -0.3275791375914652220377,
                       0.0465651162777522155323, 0.3648312306136669944636};
  const ModelParams p(5.0, 1.0, 1.0);
  const auto ka = kick_amplitudes(p, Potential::cosine(), 40);
  for (long nu = -3; nu <= 3; ++nu) {
    const double j = (nu < 0 && (-nu) % 2 ? -1.0 : 1.0) * j5[std::labs(nu)];
    const auto expected = minus_i_pow(nu) * j;
    EXPECT_NEAR(ka.at(nu).real(), expected.real(), 1e-14) << nu;
    EXPECT_NEAR(ka.at(nu).imag(), expected.imag(), 1e-14) << nu;
  }
}

TEST(KickAmplitudes, AsymmetricPotentialAgainstQuadrature) {
  // (1/2pi) int exp(-i nu x) exp(-5i (cos x + 0.3 sin 2x)) dx at 30 digits.
  struct Ref { long nu; double re, im; };
  const Ref ref[] = {{-3, 0.0, 0.6232179189794064136},  {-2, -0.36122364726160295659, 0.0},
                     {-1, 0.0, 0.15232358645925437631}, {0, 0.09113469848179429556, 0.0},
                     {1, 0.0, 0.23226171489909195586},  {2, 0.22799343319520698575, 0.0},
                     {3, 0.0, -0.079066838536294527195}};
  const ModelParams p(5.0, 1.0, 1.0);
  const auto ka = kick_amplitudes(p, Potential::fourier({1.0}, {0.0, 0.3}), 50);
  for (const auto& r : ref) {
    EXPECT_NEAR(ka.at(r.nu).real(), r.re, 1e-13) << r.nu;
    EXPECT_NEAR(ka.at(r.nu).imag(), r.im, 1e-13) << r.nu;
  }
}

TEST(KickAmplitudes, OrderLimitedByGrid) {
  const ModelParams p(1.0, 1.0, 1.0);
  EXPECT_THROW(kick_amplitudes(p, Potential::cosine(64), 17), std::invalid_argument);
  EXPECT_THROW(kick_amplitudes(p, Potential::cosine(64), -1), std::invalid_argument);
}

TEST(QuantumKernel, LambdaZeroIsIdentity) {
  const auto k = quantum_kernel(ModelParams(0.0, 1.0, 1.0), Potential::cosine(), 5);
  EXPECT_NEAR(k.at(0), 1.0, 1e-15);
  for (long nu = 1; nu <= 5; ++nu) EXPECT_NEAR(k.at(nu), 0.0, 1e-30);
}

TEST(QuantumKernel, BesselSquaredAndNormalized) {
  for (double z : {1.0, 5.0, 30.0}) {
    const ModelParams p(z, 1.0, 1.0);
    const auto k = adaptive_quantum_kernel(p, Potential::cosine());
    EXPECT_NEAR(k.sum(), 1.0, 1e-12);
    for (long nu = -k.max_order(); nu <= k.max_order(); ++nu) {
      const double j = bessel_j(nu, z);
      EXPECT_NEAR(k.at(nu), j * j, 1e-12) << "z=" << z << " nu=" << nu;
    }
    EXPECT_LE(k.tail_mass(), 1e-18);
  }
}

TEST(QuantumKernel, MomentsOfTheKernel) {
  const ModelParams p(5.0, 0.5, 1.0);
  const auto k = adaptive_quantum_kernel(p, Potential::cosine());
  // <dp^2> = lambda^2 <f^2>, <dp^4> = lambda^4 <f^4> + lambda^2 hbar^2 <f'^2>.
  EXPECT_NEAR(k.moment(2), 12.5, 1e-10);
  EXPECT_NEAR(k.moment(4), 625.0 * 0.375 + 25.0 * 0.25 * 0.5, 1e-8);
  EXPECT_NEAR(k.moment(1), 0.0, 1e-12);
}

TEST(QuantumKernel, TooNarrowSupportRaises) {
  const ModelParams p(20.0, 1.0, 1.0);
  EXPECT_THROW(quantum_kernel(p, Potential::cosine(), 5), ToleranceError);
}

TEST(QuantumKernel, UnresolvedGridRaises) {
  const ModelParams p(200.0, 1.0, 1.0);
  EXPECT_THROW(kick_amplitudes(p, Potential::cosine(64), 8), ResolutionError);
}

TEST(ClassicalKernel, DensityAndCellAverages) {
  EXPECT_NEAR(classical_kernel_density(0.0, 2.0), 1.0 / (2.0 * pi), 1e-15);
  EXPECT_EQ(classical_kernel_density(3.0, 2.0), 0.0);
  EXPECT_TRUE(std::isinf(classical_kernel_density(2.0, 2.0)));
  double total = 0.0;
  for (long nu = -20; nu <= 20; ++nu) total += classical_kernel_cell_average(nu, 1.0, 10.3);
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(ClassicalKernel, MonteCarloHistogramMatchesDensity) {
  const double lambda = 3.0;
  const auto h = classical_kernel_histogram(Potential::cosine(), lambda, 30, 400000, 11);
  EXPECT_EQ(h.outside, 0u);
  EXPECT_NEAR(h.mass(), 1.0, 1e-15);
  for (std::size_t i = 2; i + 2 < h.bins(); ++i) {
    const double a = h.lo + static_cast<double>(i) * h.bin_width();
    const double b = a + h.bin_width();
    const double exact = (std::asin(b / lambda) - std::asin(a / lambda)) / (pi * h.bin_width());
    EXPECT_LT(std::abs(h.density(i) - exact), 5.0 * h.density_error(i)) << i;
  }
}

TEST(Semiclassical, DomainsAndLimits) {
  const ModelParams p(100.0, 1.0, 1.0);
  EXPECT_THROW(semiclassical_oscillatory(100.0, p), std::domain_error);
  EXPECT_THROW(semiclassical_tail(100.0, p), std::domain_error);
  EXPECT_THROW(semiclassical_tail(50.0, p), std::domain_error);
  EXPECT_GT(semiclassical_tail_exponent(120.0, p), 0.0);
  EXPECT_NEAR(oscillation_period_orders(0.0, 10.0), 2.0, 1e-15);
  // Oscillatory formula averages to the classical density.
  const double dp = 40.0;
  EXPECT_LE(semiclassical_oscillatory(dp, p), 2.0 * classical_kernel_density(dp, 100.0) + 1e-15);
}

TEST(Semiclassical, TailTracksBesselBeyondTurningPoint) {
  const ModelParams p(100.0, 1.0, 1.0);
  for (long nu : {115, 130, 145}) {
    const double j = bessel_j(nu, 100.0);
    EXPECT_NEAR(semiclassical_tail(static_cast<double>(nu), p) / (j * j), 1.0,
                5.0 / static_cast<double>(nu));
  }
}

TEST(Semiclassical, WindowedKernelFollowsClassicalDensity) {
  const ModelParams p(100.0, 1.0, 1.0);
  const auto k = adaptive_quantum_kernel(p, Potential::cosine());
  for (long nu : {20, 45, 70}) {
    const double wc = classical_kernel_density(static_cast<double>(nu), 100.0);
    EXPECT_NEAR(windowed_density(k, nu, 100.0) / wc, 1.0, 0.03) << nu;
  }
}
