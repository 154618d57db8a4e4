#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "psse/eigensolve.hpp"

using namespace psse;

namespace {

BoundProblem infinite_well() { return {build_standard(StandardPotential::InfiniteWell, {}), {}}; }
BoundProblem harmonic() { return {build_standard(StandardPotential::Harmonic, {}), {}}; }

BoundProblem finite_well() {
  StandardParams p;
  p.a = 1.0;
  p.depth = 32.0;
  return {build_standard(StandardPotential::FiniteWell, p), {}};
}

ScanConfig harmonic_config() {
  ScanConfig cfg;
  cfg.e_min = 0.0;
  cfg.e_max = 6.0;
  cfg.grid_points = 128;
  cfg.endpoint = 8.0;
  cfg.degree = 200;
  return cfg;
}

}  // namespace

TEST(ScanConfig, Validation) {
  ScanConfig cfg;
  cfg.e_min = 1.0;
  cfg.e_max = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.grid_points = 2;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.tol = 1e-16;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(EndpointObjective, InfiniteWellIsCosine) {
  ScanConfig cfg;
  cfg.degree = 40;
  for (double e : {0.3, 1.0, 2.0, 7.0}) {
    EXPECT_NEAR(endpoint_objective(infinite_well(), e, cfg, Shooting::Even), std::cos(std::sqrt(2.0 * e)), 1e-12);
  }
  EXPECT_NEAR(endpoint_objective(infinite_well(), oracle::kWellE1, cfg, Shooting::Even), 0.0, 1e-13);
}

TEST(EndpointObjective, HarmonicChangesSignAroundGroundState) {
  const auto cfg = harmonic_config();
  const double lo = endpoint_objective(harmonic(), 0.4, cfg, Shooting::Even);
  const double hi = endpoint_objective(harmonic(), 0.6, cfg, Shooting::Even);
  EXPECT_LT(lo * hi, 0.0);
}

TEST(ScanEnergies, InfiniteWellEvenBrackets) {
  ScanConfig cfg;
  cfg.e_min = 0.1;
  cfg.e_max = 15.0;
  cfg.grid_points = 64;
  cfg.parity = ParityMode::Even;
  const auto brackets = scan_energies(infinite_well(), cfg);
  const auto contains = [&](double e) {
    return std::any_of(brackets.begin(), brackets.end(), [&](const Bracket& b) { return b.lo <= e && e <= b.hi; });
  };
  EXPECT_TRUE(contains(oracle::kWellE1));
  EXPECT_TRUE(contains(9.0 * oracle::kWellE1));
}

TEST(ScanEnergies, HarmonicSixBrackets) {
  const auto brackets = scan_energies(harmonic(), harmonic_config());
  ASSERT_EQ(brackets.size(), 6u);
  std::vector<double> mids;
  for (const auto& b : brackets) mids.push_back(0.5 * (b.lo + b.hi));
  std::sort(mids.begin(), mids.end());
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(mids[n], n + 0.5, 0.05);
}

TEST(ScanEnergies, FreeParticleHasNoBoundStates) {
  ScanConfig cfg;
  cfg.e_min = -5.0;
  cfg.e_max = -0.1;
  cfg.endpoint = 5.0;
  const BoundProblem free_particle{PotentialSpec::analytic(PowerSeries({0.0})), {}};
  try {
    (void)scan_energies(free_particle, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyScan);
  }
}

TEST(RefineEnergy, InfiniteWellGroundState) {
  ScanConfig cfg;
  const auto st = refine_energy(infinite_well(), cfg, {1.0, 1.5, Shooting::Even});
  EXPECT_NEAR(st.energy / oracle::kWellE1, 1.0, 1e-9);
  EXPECT_EQ(st.n, 0);
}

TEST(RefineEnergy, HarmonicGroundAndFourth) {
  const auto cfg = harmonic_config();
  const auto g = refine_energy(harmonic(), cfg, {0.4, 0.6, Shooting::Even});
  EXPECT_NEAR(g.energy, 0.5, 1e-8);
  EXPECT_EQ(g.n, 0);
  const auto s4 = refine_energy(harmonic(), cfg, {4.4, 4.6, Shooting::Even});
  EXPECT_NEAR(s4.energy, 4.5, 1e-8);
  EXPECT_EQ(s4.n, 4);
  const auto s5 = refine_energy(harmonic(), cfg, {5.4, 5.6, Shooting::Odd});
  EXPECT_EQ(s5.n, 5);
}

TEST(RefineEnergy, NoSignChangeIsLostBracket) {
  try {
    (void)refine_energy(harmonic(), harmonic_config(), {0.6, 1.2, Shooting::Even});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LostBracket);
  }
}

TEST(SolveBoundStates, HarmonicSpectrum) {
  const auto result = solve_bound_states(harmonic(), harmonic_config());
  ASSERT_EQ(result.states.size(), 6u);
  for (int n = 0; n < 6; ++n) {
    EXPECT_NEAR(result.states[n].energy / (n + 0.5), 1.0, 1e-8);
    EXPECT_EQ(result.states[n].n, n);
  }
  EXPECT_TRUE(result.warnings.empty());
}

TEST(SolveBoundStates, FiniteWellMatchesBisectionOracle) {
  const auto oracle_levels = oracle::finite_well_energies(1.0, 32.0);
  ASSERT_EQ(oracle_levels.size(), oracle::kFiniteWell.size());
  for (std::size_t i = 0; i < oracle_levels.size(); ++i) {
    EXPECT_NEAR(oracle_levels[i], oracle::kFiniteWell[i], 1e-12);
  }
  ScanConfig cfg;
  cfg.e_min = -32.0;
  cfg.e_max = -1e-6;
  cfg.grid_points = 256;
  const auto result = solve_bound_states(finite_well(), cfg);
  ASSERT_EQ(result.states.size(), oracle_levels.size());
  for (std::size_t i = 0; i < oracle_levels.size(); ++i) {
    EXPECT_NEAR(result.states[i].energy, oracle_levels[i], 1e-8);
    EXPECT_EQ(result.states[i].n, static_cast<int>(i));
  }
  // at least one and at most ceil(2 z0 / pi) bound states
  EXPECT_GE(result.states.size(), 1u);
  EXPECT_LE(result.states.size(), static_cast<std::size_t>(std::ceil(2.0 * 8.0 / oracle::kPi)));
}

TEST(SolveBoundStates, InfiniteWellFirstFive) {
  ScanConfig cfg;
  cfg.e_min = 0.1;
  cfg.e_max = 32.0;
  const auto result = solve_bound_states(infinite_well(), cfg);
  ASSERT_EQ(result.states.size(), 5u);
  for (int n = 1; n <= 5; ++n) {
    EXPECT_NEAR(result.states[n - 1].energy / infinite_well_reference(n, 1.0).energy, 1.0, 1e-8);
  }
}

TEST(SolveBoundStates, AsymmetricPotentialNeedsMatchedShooting) {
  const BoundProblem tilted{PotentialSpec::analytic(PowerSeries({0.0, 0.3, 0.5})), {}};
  ScanConfig cfg = harmonic_config();
  EXPECT_THROW(solve_bound_states(tilted, cfg), Error);
  cfg.parity = ParityMode::None;
  cfg.e_max = 3.0;
  const auto result = solve_bound_states(tilted, cfg);
  // V = x^2/2 + 0.3x is an oscillator shifted by -0.3 and lowered by 0.045
  ASSERT_EQ(result.states.size(), 3u);
  for (int n = 0; n < 3; ++n) {
    EXPECT_NEAR(result.states[n].energy, n + 0.5 - 0.045, 1e-8);
    EXPECT_EQ(result.states[n].n, n);
    EXPECT_EQ(result.states[n].shooting, Shooting::Matched);
  }
}

TEST(SolveBoundStates, AutoEndpointConverges) {
  ScanConfig cfg = harmonic_config();
  cfg.endpoint = 0.0;
  const auto result = solve_bound_states(harmonic(), cfg);
  ASSERT_EQ(result.states.size(), 6u);
  EXPECT_GT(result.endpoint, 0.0);
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(result.states[n].energy, n + 0.5, 1e-8);
}

TEST(EigensolveProperty, StatesAreNormalizedAndOrthogonal) {
  const auto result = solve_bound_states(harmonic(), harmonic_config());
  for (std::size_t i = 0; i < result.states.size(); ++i) {
    EXPECT_NEAR(norm_squared(result.states[i].regions), 1.0, 1e-10);
    for (std::size_t j = i + 1; j < result.states.size(); ++j) {
      EXPECT_LT(std::abs(overlap(result.states[i].regions, result.states[j].regions)), 1e-6) << i << "," << j;
    }
  }
}

TEST(EigensolveProperty, OrderingStrictlyIncreasing) {
  const auto result = solve_bound_states(finite_well(), [] {
    ScanConfig c;
    c.e_min = -32.0;
    c.e_max = -0.01;
    c.grid_points = 128;
    c.endpoint = 10.0;
    return c;
  }());
  for (std::size_t i = 1; i < result.states.size(); ++i) {
    EXPECT_GT(result.states[i].energy, result.states[i - 1].energy);
    EXPECT_GT(result.states[i].n, result.states[i - 1].n);
    // higher states penetrate further: smaller decay constant
    EXPECT_LT(std::sqrt(-2.0 * result.states[i].energy), std::sqrt(-2.0 * result.states[i - 1].energy));
  }
}

TEST(EigensolveProperty, RefinementIndependentOfGrid) {
  auto cfg = harmonic_config();
  const auto coarse = solve_bound_states(harmonic(), cfg);
  cfg.grid_points = 2 * cfg.grid_points - 1;
  const auto fine = solve_bound_states(harmonic(), cfg);
  ASSERT_EQ(coarse.states.size(), fine.states.size());
  for (std::size_t i = 0; i < fine.states.size(); ++i) {
    EXPECT_NEAR(fine.states[i].energy / coarse.states[i].energy, 1.0, 1e-10);
  }
}

TEST(EigensolveProperty, ThreadCountDoesNotChangeResults) {
  auto cfg = harmonic_config();
  const auto serial = solve_bound_states(harmonic(), cfg);
  cfg.threads = 4;
  const auto parallel = solve_bound_states(harmonic(), cfg);
  ASSERT_EQ(serial.states.size(), parallel.states.size());
  for (std::size_t i = 0; i < serial.states.size(); ++i) {
    EXPECT_EQ(serial.states[i].energy, parallel.states[i].energy);
  }
}

TEST(EigensolveProperty, NodeGapIsReported) {
  // a grid too coarse to separate the two lowest even states leaves a hole in the node sequence
  ScanConfig cfg = harmonic_config();
  cfg.parity = ParityMode::Even;
  cfg.e_min = 1.0;
  cfg.e_max = 6.0;
  cfg.grid_points = 8;
  const auto result = solve_bound_states(harmonic(), cfg);
  ASSERT_FALSE(result.states.empty());
  EXPECT_FALSE(result.warnings.empty());
}
