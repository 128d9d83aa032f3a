#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qkr/error.hpp"
#include "qkr/oracle.hpp"

namespace qkr {
namespace {

TEST(Oracle, BesselValuesAgainstTables) {
  // J_0(1) = 0.7651976865579666, J_1(1) = 0.4400505857449335.
  const auto p = oracle::bessel_one_kick(1.0, 10);
  EXPECT_NEAR(p[10], 0.7651976865579666 * 0.7651976865579666, 1e-15);
  EXPECT_NEAR(p[11], 0.4400505857449335 * 0.4400505857449335, 1e-15);
  EXPECT_EQ(p[9], p[11]);
  double total = 0.0;
  for (double v : p) total += v;
  EXPECT_NEAR(total, 1.0, 1e-14);
  // J_0 has its first zero at 2.404825557695773.
  EXPECT_NEAR(oracle::bessel_one_kick(2.404825557695773, 5)[5], 0.0, 1e-28);
}

TEST(Oracle, BesselAtZeroArgument) {
  const auto p = oracle::bessel_one_kick(0.0, 3);
  EXPECT_EQ(p[3], 1.0);
  EXPECT_EQ(p[0] + p[1] + p[2] + p[4] + p[5] + p[6], 0.0);
}

TEST(Oracle, RandomOrbitalsAreOrthonormal) {
  auto g = Grid::make_scaled(50, 17.0);
  const auto orbs = oracle::random_orbitals(g, 6, 1);
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      EXPECT_NEAR(std::abs(overlap(orbs[a], orbs[b])), a == b ? 1.0 : 0.0,
                  1e-13);
    }
  }
  const auto again = oracle::random_orbitals(g, 6, 1);
  EXPECT_EQ((again[3].amplitudes - orbs[3].amplitudes).norm(), 0.0);
}

TEST(Oracle, PreconditionsAreEnforced) {
  auto big = Grid::make_scaled(256, 50.0);
  const auto orbs = oracle::random_orbitals(big, 2, 1);
  EXPECT_THROW(oracle::brute_obdm_n2(orbs[0], orbs[1]), ConfigError);
  auto g = Grid::make_scaled(32, 20.0);
  const auto same = oracle::random_orbitals(g, 1, 1);
  EXPECT_THROW(oracle::brute_obdm_n2(same[0], same[0]), ConfigError);
  EXPECT_THROW(oracle::fock_green_function(Eigen::MatrixXcd::Zero(80, 2)),
               ConfigError);
}

TEST(Oracle, BruteObdmOfTwoBosonsHasTraceTwo) {
  auto g = Grid::make_scaled(40, 2.0 * std::numbers::pi * 5.0);
  const auto orbs = oracle::random_orbitals(g, 2, 17);
  const Obdm rho = oracle::brute_obdm_n2(orbs[0], orbs[1]);
  EXPECT_NEAR(rho.rho.trace().real(), 2.0, 1e-12);
  EXPECT_LT((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
}

}  // namespace
}  // namespace qkr
