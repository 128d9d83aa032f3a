#include <gtest/gtest.h>

#include "qkr/error.hpp"
#include "qkr/units.hpp"

namespace qkr {
namespace {

TEST(Units, CesiumKickStrengthAt60us) {
  const ScaledParams s = derive_scaled(cesium_1064());
  EXPECT_NEAR(s.K, 3.3, 0.02 * 3.3);
  EXPECT_NEAR(s.hbar_eff, 4.0, 0.01 * 4.0);
  EXPECT_NEAR(s.pulse_fraction, 1.0 / 6.0, 1e-15);
}

TEST(Units, CesiumKickStrengthAt80us) {
  PhysicalParams p = cesium_1064();
  p.kick_period = 80e-6;
  EXPECT_NEAR(derive_scaled(p).K, 4.4, 0.02 * 4.4);
}

TEST(Units, KEqualsHbarTimesKappaExactly) {
  const ScaledParams s = derive_scaled(cesium_1064());
  EXPECT_EQ(s.K, s.hbar_eff * s.kappa);
}

TEST(Units, RecoilEnergyMatchesDefinition) {
  const PhysicalParams p = cesium_1064();
  const double e_r = kHbar * p.recoil_rate();
  const double expected = std::numbers::pi * std::numbers::pi * kHbar * kHbar /
                          (2.0 * p.particle_mass * p.lattice_constant *
                           p.lattice_constant);
  EXPECT_NEAR(e_r / expected, 1.0, 1e-14);
}

TEST(Units, KIncreasesWithEachDrivingParameter) {
  const double base = derive_scaled(cesium_1064()).K;
  PhysicalParams p = cesium_1064();
  p.kick_period *= 1.1;
  EXPECT_GT(derive_scaled(p).K, base);
  p = cesium_1064();
  p.pulse_width *= 1.1;
  EXPECT_GT(derive_scaled(p).K, base);
  p = cesium_1064();
  p.kick_depth_er *= 1.1;
  EXPECT_GT(derive_scaled(p).K, base);
}

TEST(Units, RejectsInvalidParameters) {
  PhysicalParams p = cesium_1064();
  p.pulse_width = p.kick_period;
  EXPECT_THROW(derive_scaled(p), ConfigError);
  p = cesium_1064();
  p.particle_mass = -1.0;
  EXPECT_THROW(derive_scaled(p), ConfigError);
  p = cesium_1064();
  p.kick_depth_er = -1.0;
  EXPECT_THROW(derive_scaled(p), ConfigError);
}

TEST(Units, EnergyToRecoils) {
  EXPECT_EQ(energy_to_recoils(0.0, 4.0), 0.0);
  EXPECT_NEAR(energy_to_recoils(2.0, 4.0), 1.0, 1e-15);
  // Pure state at P = 2 hbar k_L: p = hbar_eff, p^2 / 2 = 8.
  EXPECT_NEAR(energy_to_recoils(8.0, 4.0), 4.0, 1e-15);
}

TEST(Units, UnknownSpeciesIsRejected) {
  PhysicalParams p;
  EXPECT_FALSE(physical_preset("unobtainium", p));
  EXPECT_TRUE(physical_preset("cesium-1064", p));
}

}  // namespace
}  // namespace qkr
