#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "kicked/bessel.hpp"

using kicked::bessel_j;
using kicked::bessel_j_sequence;

namespace {

// Ascending power series sum_k (-1)^k (z/2)^(n+2k) / (k! (n+k)!), fine for small z.
double power_series(long n, double z) {
  double term = std::pow(0.5 * z, static_cast<double>(n)) / std::tgamma(n + 1.0);
  double sum = term;
  for (int k = 1; k < 40; ++k) {
    term *= -0.25 * z * z / (k * static_cast<double>(n + k));
    sum += term;
  }
  return sum;
}

}  // namespace

TEST(Bessel, MatchesPowerSeriesForModerateArguments) {
  for (double z : {0.1, 0.5, 1.0, 2.5, 4.0})
    for (long n = 0; n <= 12; ++n)
      EXPECT_NEAR(bessel_j(n, z), power_series(n, z), 1e-14) << "n=" << n << " z=" << z;
}

TEST(Bessel, FrozenHighPrecisionValues) {
  EXPECT_NEAR(bessel_j(0, 1.0), 0.7651976865579665514497, 1e-15);
  EXPECT_NEAR(bessel_j(3, 0.5), 0.002563729994587244075354, 1e-17);
  EXPECT_NEAR(bessel_j(5, 1e-4) / 2.604166665581597846397e-24, 1.0, 1e-13);
  EXPECT_NEAR(bessel_j(0, 5.0), -0.1775967713143383043474, 1e-15);
  EXPECT_NEAR(bessel_j(1, 5.0), -0.3275791375914652220377, 1e-15);
  EXPECT_NEAR(bessel_j(7, 5.0), 0.05337641015589071543069, 1e-15);
  EXPECT_NEAR(bessel_j(2, 10.0), 0.2546303136851206225317, 1e-15);
  EXPECT_NEAR(bessel_j(50, 100.0), -0.0386983397285253834665, 1e-14);
  EXPECT_NEAR(bessel_j(120, 100.0) / 1.14762217956649360507e-05, 1.0, 1e-11);
  EXPECT_NEAR(bessel_j(0, 1e6), 0.000331043013739873740988, 1e-13);
  EXPECT_NEAR(bessel_j(1000, 1e6), 0.000638565605498111023566, 1e-13);
}

TEST(Bessel, NegativeOrderReflection) {
  for (long n = 1; n <= 9; ++n)
    EXPECT_DOUBLE_EQ(bessel_j(-n, 5.0), (n % 2 ? -1.0 : 1.0) * bessel_j(n, 5.0));
}

TEST(Bessel, SquaresSumToOne) {
  const auto j = bessel_j_sequence(40, 10.0);
  double s = j[0] * j[0];
  for (std::size_t n = 1; n < j.size(); ++n) s += 2.0 * j[n] * j[n];
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Bessel, SequenceAgreesWithPointEvaluation) {
  const auto j = bessel_j_sequence(60, 37.3);
  for (long n = 0; n <= 60; ++n) EXPECT_NEAR(j[static_cast<std::size_t>(n)], bessel_j(n, 37.3), 1e-15);
}

TEST(Bessel, ZeroArgument) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(bessel_j(4, 0.0), 0.0);
}

TEST(Bessel, DeepUnderflowIsZero) { EXPECT_EQ(bessel_j(2000, 1.0), 0.0); }

TEST(Bessel, DomainErrors) {
  EXPECT_THROW(bessel_j(0, -1.0), std::domain_error);
  EXPECT_THROW(bessel_j(0, std::nan("")), std::domain_error);
  EXPECT_THROW(bessel_j(0, 2e6), std::range_error);
}
