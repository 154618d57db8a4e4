#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "psse/observables.hpp"

using namespace psse;

namespace {

const Interval kWell(-1.0, 1.0);

// Infinite-well ground state on [-1, 1], normalized.
PowerSeries well_ground_state() {
  return normalize(PowerSeries(oracle::cosine_coefficients(oracle::kPi / 2.0, 40)), kWell);
}

}  // namespace

TEST(Norm, Examples) {
  EXPECT_DOUBLE_EQ(norm_squared(PowerSeries({1.0}), Interval(0.0, 1.0)), 1.0);
  EXPECT_NEAR(norm_squared(PowerSeries({0.0, 1.0}), kWell), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(norm_squared(PowerSeries(oracle::cosine_coefficients(oracle::kPi / 2.0, 24)), kWell), 1.0, 1e-10);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize(PowerSeries({2.0}), Interval(0.0, 1.0)).vector(), std::vector<double>({1.0}));
  const auto s = normalize(PowerSeries({0.0, -3.0}), kWell);
  EXPECT_EQ(s[0], 0.0);
  EXPECT_NEAR(s[1], std::sqrt(1.5), 1e-15);
}

TEST(Normalize, ZeroSeriesThrows) {
  try {
    (void)normalize(PowerSeries({0.0}), kWell);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroNorm);
  }
}

TEST(Expectation, InfiniteWellGroundState) {
  const auto psi = well_ground_state();
  EXPECT_NEAR(expectation(psi, OperatorSpec::identity(), kWell).value, 1.0, 1e-12);
  EXPECT_NEAR(expectation(psi, OperatorSpec::position(), kWell).value, 0.0, 1e-12);
  EXPECT_NEAR(expectation(psi, OperatorSpec::position_squared(), kWell).value, oracle::kWellX2, 1e-10);
  EXPECT_NEAR(expectation(psi, OperatorSpec::kinetic(1.0, 1.0), kWell).value, oracle::kWellE1, 1e-9);
}

TEST(Expectation, ReportCarriesMetadata) {
  const auto r = expectation(well_ground_state(), OperatorSpec::position_squared(), kWell);
  EXPECT_EQ(r.operator_name, "x2");
  EXPECT_EQ(r.interval, kWell);
  EXPECT_EQ(r.degree, 40u);
}

TEST(Expectation, HeisenbergProduct) {
  const auto psi = well_ground_state();
  const double x2 = expectation(psi, OperatorSpec::position_squared(), kWell).value;
  const double t = expectation(psi, OperatorSpec::kinetic(1.0, 1.0), kWell).value;
  const double product = std::sqrt(x2) * std::sqrt(2.0 * t);
  EXPECT_GE(product, 0.5);
  EXPECT_NEAR(product, oracle::kWellHeisenberg, 1e-9);
}

TEST(Expectation, PotentialOperator) {
  // <V> for V = x^2/2 equals half of <x^2>
  const auto psi = well_ground_state();
  const double v = expectation(psi, OperatorSpec::potential(PowerSeries({0.0, 0.0, 0.5})), kWell).value;
  EXPECT_NEAR(v, 0.5 * oracle::kWellX2, 1e-10);
}

TEST(Expectation, PiecewiseMatchesSingleSeries) {
  const auto psi = well_ground_state();
  std::vector<LocalSeries> pieces;
  for (double a = -1.0; a < 1.0 - 1e-12; a += 0.5) pieces.push_back({Interval(a, a + 0.5), recenter(psi, a)});
  const PiecewiseSeries chain(pieces);
  EXPECT_NEAR(norm_squared(chain), 1.0, 1e-12);
  for (const auto& op : {OperatorSpec::position(), OperatorSpec::position_squared(), OperatorSpec::kinetic(1.0, 1.0),
                         OperatorSpec::potential(PowerSeries({0.1, 0.2, 0.3}))}) {
    EXPECT_NEAR(expectation(chain, op).value, expectation(psi, op, kWell).value, 1e-11) << op.name();
  }
  EXPECT_NEAR(overlap(chain, chain), 1.0, 1e-12);
}

TEST(PrincipalFraction, Examples) {
  EXPECT_TRUE(principal_fraction_check(1.0, 1.0000005, Tolerance(1e-6)).converged);
  EXPECT_FALSE(principal_fraction_check(1.0, 1.1, Tolerance(1e-6)).converged);
  const auto zero = principal_fraction_check(0.0, 1e-9, Tolerance(1e-6));
  EXPECT_TRUE(zero.converged);
  EXPECT_TRUE(zero.used_absolute);
  const ExpectationReport a{"x2", 1.0, kWell, 10}, b{"x2", 1.0 + 1e-8, kWell, 12};
  EXPECT_TRUE(principal_fraction_converged(a, b, Tolerance(1e-6)));
}

TEST(ResidualFraction, Examples) {
  EXPECT_DOUBLE_EQ(residual_fraction(1.0, 1.0, 0.0), 1.0);
  EXPECT_NEAR(residual_fraction(1.0, 1.0, std::log(10.0)), 0.01, 1e-16);
  EXPECT_NEAR(residual_fraction(2.0, 0.5, 10.0), oracle::kResidual8eMinus10, 1e-16);
}

TEST(EstimateInterval, Examples) {
  EXPECT_NEAR(estimate_interval(1.0, 1.0, Tolerance(oracle::kExpMinus2)), 2.0, 1e-14);
  EXPECT_NEAR(estimate_interval(1.0, 1.0, Tolerance(1e-8)), oracle::kEightLn10, 1e-12);
  try {
    (void)estimate_interval(1.0, 2.0, Tolerance(1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TauTooLarge);
  }
}

TEST(ObservablesProperty, NormalizedVarianceNonNegative) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(9);
    for (auto& v : c) v = u(rng);
    const Interval iv(-1.0 - std::abs(u(rng)), 1.0 + std::abs(u(rng)));
    const auto psi = normalize(PowerSeries(c), iv);
    EXPECT_NEAR(expectation(psi, OperatorSpec::identity(), iv).value, 1.0, 1e-12);
    const double m1 = expectation(psi, OperatorSpec::position(), iv).value;
    const double m2 = expectation(psi, OperatorSpec::position_squared(), iv).value;
    EXPECT_GE(m2 - m1 * m1, -1e-12);
  }
}

TEST(ObservablesProperty, ResidualFractionDecreasesAndInverts) {
  for (double c : {0.3, 1.0, 4.0}) {
    for (double alpha : {0.2, 1.0, 5.0}) {
      double prev = residual_fraction(c, alpha, 0.0);
      for (double b = 0.25; b < 10.0; b += 0.25) {
        const double f = residual_fraction(c, alpha, b);
        EXPECT_LT(f, prev);
        prev = f;
      }
      for (double tau : {1e-12, 1e-8, 1e-3}) {
        if (!(tau < c * c / alpha)) continue;
        const double width = estimate_interval(c, alpha, Tolerance(tau));
        EXPECT_NEAR(residual_fraction(c, alpha, width / 2.0) / tau, 1.0, 1e-12);
      }
    }
  }
}
