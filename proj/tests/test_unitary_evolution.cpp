#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "kicked/bessel.hpp"
#include "kicked/errors.hpp"
#include "kicked/kernels.hpp"
#include "kicked/measured_evolution.hpp"
#include "kicked/unitary_evolution.hpp"

using namespace kicked;
using cplx = std::complex<double>;

TEST(WaveFunction, Construction) {
  const auto psi = WaveFunction::eigenstate(4, 2);
  EXPECT_EQ(psi.at(2), cplx(1.0));
  EXPECT_EQ(psi.at(9), cplx(0.0));
  EXPECT_THROW(WaveFunction::eigenstate(4, 5), ConfigError);
  EXPECT_THROW(WaveFunction::from_amplitudes(1, {1.0, 1.0, 0.0}), ConfigError);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NO_THROW(WaveFunction::from_amplitudes(1, {r, 0.0, cplx(0.0, r)}));
}

TEST(FreePropagate, ZeroTimeIsIdentityAndResonantTimeIsTrivial) {
  const ModelParams p(1.0, 1.0, 1.0);
  const double r = 1.0 / std::sqrt(3.0);
  const auto psi = WaveFunction::from_amplitudes(2, {0.0, r, cplx(0.0, r), 0.0, r});
  const auto same = free_propagate(psi, p, 0.0);
  const auto resonant = free_propagate(psi, p, 4.0 * pi);
  for (long n = -2; n <= 2; ++n) {
    EXPECT_EQ(same.at(n), psi.at(n));
    EXPECT_NEAR(std::abs(resonant.at(n) - psi.at(n)), 0.0, 1e-12);
  }
  const auto later = free_propagate(psi, p, 0.37);
  EXPECT_NEAR(std::norm(later.at(2)), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(std::arg(later.at(2) / psi.at(2)), -2.0 * 0.37, 1e-14);
  EXPECT_THROW(free_propagate(psi, p, -1.0), std::invalid_argument);
}

TEST(Kick, LambdaZeroIsIdentity) {
  const auto psi = WaveFunction::eigenstate(16, 3);
  const auto out = kick(psi, ModelParams(0.0, 1.0, 1.0), Potential::cosine());
  for (long n = -16; n <= 16; ++n) EXPECT_NEAR(std::abs(out.at(n) - psi.at(n)), 0.0, 1e-15);
}

TEST(Kick, AmplitudesAreMinusIPowBessel) {
  const ModelParams p(5.0, 1.0, 1.0);
  const long n0 = 7;
  const auto out = kick(WaveFunction::eigenstate(64, n0), p, Potential::cosine());
  const cplx phase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (long n = -30; n <= 40; ++n) {
    const long nu = n - n0;
    const cplx expected = phase[((nu % 4) + 4) % 4] * bessel_j(nu, 5.0);
    EXPECT_NEAR(std::abs(out.at(n) - expected), 0.0, 1e-13) << n;
  }
  EXPECT_NEAR(out.norm(), 1.0, 1e-13);
}

TEST(Collapse, ProbabilitiesAndMoments) {
  const auto d = collapse(WaveFunction::eigenstate(5, 3));
  EXPECT_EQ(d.at(3), 1.0);
  const ModelParams p(2.0, 1.0, 1.0);
  const auto psi = period_propagate(WaveFunction::eigenstate(40, 0), p, Potential::cosine());
  const auto c = collapse(psi);
  const auto m = measure(psi, 1.0, 1);
  EXPECT_NEAR(momentum_moment(c, 1.0, 2), m.p2, 1e-14);
  EXPECT_NEAR(m.p2, 2.0, 1e-12);
}

TEST(PeriodPropagate, CollapseEqualsMasterStep) {
  const auto v = Potential::fourier({1.0}, {0.0, 0.3});
  for (double tau : {0.2, 0.9}) {
    const ModelParams p(3.0, 1.0, 1.0, tau);
    const auto k = adaptive_quantum_kernel(p, v);
    const auto psi = period_propagate(WaveFunction::eigenstate(60, -5), p, v);
    const auto expected = master_step(MomentumDistribution::delta(60, -5), k);
    const auto got = collapse(psi);
    for (long n = -60; n <= 60; ++n) EXPECT_NEAR(got.at(n), expected.at(n), 1e-12);
  }
}

TEST(EvolveUnitary, NormDriftPerStepIsTiny) {
  const ModelParams p(3.0, 1.0, 1.0);
  const auto run = evolve_unitary(WaveFunction::eigenstate(512, 0), p, Potential::cosine(), 100);
  EXPECT_NEAR(run.final_state.norm(), 1.0, 100 * 1e-12);
  EXPECT_LT(run.trajectory.back().tail_mass, 1e-12);
}

TEST(EvolveUnitary, FirstStepMatchesMeasuredChain) {
  const ModelParams p(5.0, 1.0, 1.0);
  const auto run = evolve_unitary(WaveFunction::eigenstate(256, 0), p, Potential::cosine(), 3);
  EXPECT_NEAR(run.trajectory[1].p2, 12.5, 1e-11);
  EXPECT_NEAR(run.trajectory[1].p4, 246.875, 1e-9);
}

TEST(EvolveUnitary, LambdaZeroHoldsMoments) {
  const auto run = evolve_unitary(WaveFunction::eigenstate(8, 2), ModelParams(0.0, 1.0, 1.0),
                                  Potential::cosine(), 10);
  for (const auto& r : run.trajectory.records) EXPECT_NEAR(r.p2, 4.0, 1e-13);
}

TEST(EvolveUnitary, SmallLatticeOverflows) {
  const ModelParams p(5.0, 1.0, 1.0);
  EXPECT_THROW(evolve_unitary(WaveFunction::eigenstate(20, 0), p, Potential::cosine(), 50),
               LatticeOverflow);
}

TEST(ResonanceWarning, FlagsRationalRatios) {
  EXPECT_TRUE(resonance_warning(ModelParams(1.0, 1.0, 4.0 * pi)).has_value());
  EXPECT_TRUE(resonance_warning(ModelParams(1.0, 1.0, 2.0 * pi)).has_value());
  EXPECT_TRUE(resonance_warning(ModelParams(1.0, 1.0, 4.0 * pi * 3.0 / 7.0)).has_value());
  EXPECT_FALSE(resonance_warning(ModelParams(1.0, 1.0, 1.0)).has_value());
}
