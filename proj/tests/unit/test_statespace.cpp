#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sea/dynamics.hpp"
#include "sea/random.hpp"
#include "sea/statespace.hpp"

using namespace sea;

namespace {

const EnergySpectrum kThree({0.0, 1.0, 2.0});

// Oracle values for p = (0.2, 0.6, 0.2) over (0, 1, 2).
constexpr double kS0 = 0.95027053923323455976;
constexpr double kBetaMin = 0.70782240926787342483;
constexpr double kEMin = 0.56367759697160922004;
constexpr double kAvailability = 0.43632240302839077996;
constexpr double kOmega523 = 0.17795295037980677707;

TEST(Curve, TwoLevelPeak) {
  const auto curve = smax_curve(EnergySpectrum({0.0, 1.0}), 512);
  EXPECT_NEAR(curve.peak().energy, 0.5, 1e-15);
  EXPECT_NEAR(curve.peak().entropy, std::log(2.0), 1e-15);
  EXPECT_EQ(curve.peak().beta, 0.0);
}

TEST(Curve, ThreeLevelGeometry) {
  const auto curve = smax_curve(kThree, 512);
  EXPECT_EQ(curve.samples().size(), 512u);
  EXPECT_LE(curve.concavity_violation(), 1e-8);
  EXPECT_NEAR(curve.peak().energy, 1.0, 1e-9);
  EXPECT_NEAR(curve.peak().entropy, std::log(3.0), 1e-9);
  for (std::size_t i = 1; i < curve.samples().size(); ++i) {
    EXPECT_GT(curve.samples()[i].energy, curve.samples()[i - 1].energy);
    EXPECT_LT(curve.samples()[i].beta, curve.samples()[i - 1].beta);
  }
}

TEST(Curve, SecondDifferencesNonPositive) {
  const auto curve = smax_curve(kThree, 512);
  const auto& s = curve.samples();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double left = (s[i].entropy - s[i - 1].entropy) / (s[i].energy - s[i - 1].energy);
    const double right = (s[i + 1].entropy - s[i].entropy) / (s[i + 1].energy - s[i].energy);
    EXPECT_LE(right - left, 1e-8);
  }
}

TEST(Curve, SingleLevel) {
  const auto curve = smax_curve(EnergySpectrum({1.0, 1.0}), 16);
  EXPECT_EQ(curve.samples().size(), 1u);
  EXPECT_NEAR(curve.peak().entropy, std::log(2.0), 1e-15);
}

TEST(Curve, SmaxExactAndInterpolated) {
  const auto curve = smax_curve(kThree, 512);
  const auto eq = beta_from_energy(0.8, kThree);
  EXPECT_NEAR(curve.smax(0.8), entropy(eq.distribution), 1e-15);
  EXPECT_NEAR(curve.interpolate(0.8), curve.smax(0.8), 1e-6);
  EXPECT_NEAR(curve.interpolate(1.7), curve.smax(1.7), 1e-6);
  EXPECT_EQ(curve.smax(0.0), 0.0);
  EXPECT_THROW(curve.smax(2.5), std::domain_error);
}

TEST(CurveProperty, DominatesRandomStates) {
  Rng rng(401);
  const auto curve = smax_curve(kThree, 512);
  for (int i = 0; i < 10000; ++i) {
    const auto p = validate_state(rng.sparse_simplex_point(3, 0.2));
    const double e = energy(p, kThree);
    ASSERT_LE(entropy(p), curve.smax(e) + 1e-9);
    ASSERT_TRUE(is_feasible_point(e, entropy(p), curve));
  }
}

TEST(Feasibility, Boundaries) {
  const auto curve = smax_curve(kThree);
  EXPECT_TRUE(is_feasible_point(1.0, std::log(3.0), curve));
  EXPECT_FALSE(is_feasible_point(1.0, std::log(3.0) + 1e-6, curve));
  EXPECT_FALSE(is_feasible_point(-0.1, 0.0, curve));
  EXPECT_FALSE(is_feasible_point(1.0, -0.1, curve));
  EXPECT_TRUE(is_feasible_point(0.0, 0.0, curve));
  EXPECT_FALSE(is_feasible_point(0.0, 0.1, curve));
}

TEST(AdiabaticAvailability, Oracle) {
  const auto curve = smax_curve(kThree);
  EXPECT_NEAR(adiabatic_availability(1.0, kS0, curve), kAvailability, 1e-12);
  const auto eq = beta_from_energy(kEMin, kThree);
  EXPECT_NEAR(eq.beta, kBetaMin, 1e-12);
}

TEST(AdiabaticAvailability, ZeroOnPositiveBranch) {
  const auto curve = smax_curve(kThree);
  const auto c = canonical_distribution(0.8, kThree, kThree.full_support());
  EXPECT_NEAR(adiabatic_availability(energy(c, kThree), entropy(c), curve), 0.0, 1e-12);
  // A stable state above the mean still has availability: its entropy twin
  // lies on the positive branch.
  const auto hot = canonical_distribution(-0.8, kThree, kThree.full_support());
  EXPECT_GT(adiabatic_availability(energy(hot, kThree), entropy(hot), curve), 0.5);
}

TEST(AdiabaticAvailability, RejectsInfeasible) {
  const auto curve = smax_curve(kThree);
  EXPECT_THROW(adiabatic_availability(1.0, 2.0, curve), std::domain_error);
  EXPECT_THROW(adiabatic_availability(0.1, 1.0, curve), std::domain_error);
}

TEST(AvailableEnergy, Oracle) {
  const auto p = validate_state(std::vector<double>{0.5, 0.2, 0.3});
  EXPECT_NEAR(available_energy(energy(p, kThree), entropy(p), ReservoirSpec(1.0), kThree), kOmega523, 1e-14);
  EXPECT_THROW(ReservoirSpec(0.0), std::invalid_argument);
  EXPECT_THROW(ReservoirSpec(-1.0), std::invalid_argument);
}

TEST(AvailableEnergyProperty, NonNegativeAndZeroAtReference) {
  Rng rng(402);
  for (double tr : {0.3, 1.0, 3.0}) {
    const ReservoirSpec r(tr);
    for (int i = 0; i < 3000; ++i) {
      const std::size_t n = 2 + rng.index(6);
      const EnergySpectrum s(rng.levels(n, 0.0, 4.0));
      const auto p = validate_state(rng.sparse_simplex_point(n, 0.2));
      ASSERT_GE(available_energy(energy(p, s), entropy(p), r, s), -1e-10);
    }
    const auto c = canonical_distribution(1.0 / tr, kThree, kThree.full_support());
    EXPECT_NEAR(available_energy(energy(c, kThree), entropy(c), r, kThree), 0.0, 1e-10);
  }
}

TEST(AvailableEnergyProperty, EntropyIndependentOfReservoir) {
  Rng rng(403);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_state(rng, 3);
    const double e = energy(p, kThree);
    const double s = entropy(p);
    for (double tr : {0.2, 0.7, 1.0, 5.0}) {
      const ReservoirSpec r(tr);
      const double omega = available_energy(e, s, r, kThree);
      EXPECT_NEAR(entropy_from_available_energy(e, omega, r, kThree), s, 1e-11);
    }
  }
}

TEST(AvailableEnergyProperty, DecreasesAlongRelaxation) {
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  cfg.sample_stride = 10;
  const auto traj = integrate(validate_state(std::vector<double>{0.5, 0.2, 0.3}), kThree, ModelConstants{}, cfg);
  for (double tr : {0.3, 1.0, 3.0}) {
    const ReservoirSpec r(tr);
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
      EXPECT_LT(available_energy(traj.points[i].energy, traj.points[i].entropy, r, kThree),
                available_energy(traj.points[i - 1].energy, traj.points[i - 1].entropy, r, kThree));
    }
  }
}

TEST(Demon, StablePositiveStateIsInfeasible) {
  const auto curve = smax_curve(kThree);
  for (double beta : {0.1, 0.5, 1.0, 3.0}) {
    const auto c = canonical_distribution(beta, kThree, kThree.full_support());
    const auto v = demon_check(energy(c, kThree), entropy(c), curve);
    EXPECT_FALSE(v.feasible) << "beta " << beta;
    EXPECT_EQ(v.branch, Branch::positive_temperature);
    EXPECT_FALSE(v.witness.has_value());
  }
}

TEST(Demon, InteriorStateHasWitness) {
  const auto curve = smax_curve(kThree);
  const auto v = demon_check(1.0, kS0, curve);
  ASSERT_TRUE(v.feasible);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.branch, Branch::infinite_temperature);
  EXPECT_NEAR(v.witness_energy, kEMin, 1e-9);
  EXPECT_LT(energy(*v.witness, kThree), 1.0);
  EXPECT_GE(entropy(*v.witness), kS0);
}

TEST(Demon, GroundStateInfeasible) {
  const auto curve = smax_curve(kThree);
  EXPECT_FALSE(demon_check(0.0, 0.0, curve).feasible);
}

TEST(Demon, NegativeTemperatureStateIsFeasible) {
  const auto curve = smax_curve(kThree);
  const auto c = canonical_distribution(-1.0, kThree, kThree.full_support());
  const auto v = demon_check(energy(c, kThree), entropy(c), curve);
  EXPECT_TRUE(v.feasible);
  EXPECT_EQ(v.branch, Branch::negative_temperature);
}

TEST(Demon, RejectsInfeasibleInput) {
  const auto curve = smax_curve(kThree);
  EXPECT_THROW(demon_check(1.0, 5.0, curve), std::domain_error);
}

TEST(DemonProperty, WitnessesAreValid) {
  Rng rng(404);
  const auto curve = smax_curve(kThree);
  for (int i = 0; i < 300; ++i) {
    const auto p = random_state(rng, 3);
    const double e = energy(p, kThree);
    const double s = entropy(p);
    const auto v = demon_check(e, s, curve);
    if (!v.feasible) continue;
    EXPECT_LT(energy(*v.witness, kThree), e);
    EXPECT_GE(entropy(*v.witness), s);
  }
}

}  // namespace
