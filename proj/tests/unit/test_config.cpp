#include <gtest/gtest.h>

#include <algorithm>

#include "qkr/config.hpp"
#include "qkr/error.hpp"

namespace qkr {
namespace {

TEST(Config, ParsesCommentsWhitespaceAndDottedKeys) {
  const Config c = Config::from_text(
      "# comment line\n"
      "  grid.n_dim   =  1024   # trailing comment\n"
      "\n"
      "gas.model = tonks\n"
      "gas.n_particles=6\n");
  const ExperimentConfig e = c.resolve();
  EXPECT_EQ(e.n_dim, 1024u);
  EXPECT_EQ(e.model, GasModel::kTonks);
  EXPECT_EQ(e.n_particles, 6u);
  EXPECT_TRUE(e.obdm_enabled);  // auto for the Tonks model
}

TEST(Config, Defaults) {
  const ExperimentConfig e = Config().resolve();
  EXPECT_EQ(e.model, GasModel::kGamma0);
  EXPECT_EQ(e.n_particles, 1u);
  EXPECT_NEAR(e.kick.K, 3.3, 0.02 * 3.3);
  EXPECT_EQ(e.kick.kind, KickKind::kPeriodicSquare);
  EXPECT_EQ(e.monitor.policy, BoundaryPolicy::kError);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::from_text("grid.n_dim 1024\n"), ConfigError);
  EXPECT_THROW(Config::from_text("grid.ndim = 1024\n"), ConfigError);
  EXPECT_THROW(Config::from_text(" = 3\n"), ConfigError);
  EXPECT_THROW(Config::from_text("grid.n_dim = lots\n").resolve(),
               ConfigError);
  EXPECT_THROW(Config::from_text("gas.model = anyon\n").resolve(),
               ConfigError);
  EXPECT_THROW(Config::from_text("physical.pulse_width = 1\n").resolve(),
               ConfigError);
  EXPECT_THROW(
      Config::from_text("kick.realizations = 3\n").resolve(), ConfigError);
  EXPECT_THROW(Config::from_text("gas.model = gamma0\nobdm.enabled = true\n")
                   .resolve(),
               ConfigError);
  EXPECT_THROW(Config::from_text("analysis.window_lo = 900\n").resolve(),
               ConfigError);
  EXPECT_THROW(Config::from_text("base = no-such-preset\n"), ConfigError);
  Config c;
  EXPECT_THROW(c.set_assignment("grid.n_dim"), ConfigError);
}

TEST(Config, HashIgnoresKeyOrder) {
  const Config a = Config::from_text("grid.n_dim = 512\nkick.n_kicks = 7\n");
  const Config b =
      Config::from_text("kick.n_kicks = 7\n# x\ngrid.n_dim=512\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.canonical(), b.canonical());
  const Config c = Config::from_text("grid.n_dim = 513\nkick.n_kicks = 7\n");
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, OverridesAndExplicitK) {
  Config c;
  c.set_assignment("kick.K = 5.0");
  c.set("kick.n_kicks", "12");
  const ExperimentConfig e = c.resolve();
  EXPECT_EQ(e.kick.K, 5.0);
  EXPECT_FALSE(e.kick_k_derived);
  EXPECT_EQ(e.kick.n_kicks, 12);
}

TEST(Config, RecordLadderIsStrictlyIncreasingAndHoldsSnapshots) {
  Config c;
  c.set("kick.n_kicks", "801");
  c.set("record.series_step", "10");
  c.set("record.snapshot_step", "100");
  const ExperimentConfig e = c.resolve();
  const auto rec = e.record_kicks();
  EXPECT_EQ(rec.front(), 0);
  EXPECT_TRUE(std::adjacent_find(rec.begin(), rec.end(),
                                 [](long a, long b) { return a >= b; }) ==
              rec.end());
  const auto snaps = e.snapshot_kicks();
  const std::vector<long> expected = {0, 1, 101, 201, 301, 401, 501, 601, 701, 801};
  EXPECT_EQ(snaps, expected);
  for (long s : snaps) {
    EXPECT_TRUE(std::binary_search(rec.begin(), rec.end(), s));
    EXPECT_TRUE(e.is_snapshot(s));
  }
  EXPECT_FALSE(e.is_snapshot(100));
}

TEST(Config, EveryShippedPresetResolves) {
  const auto names = Config::list_presets();
  ASSERT_GE(names.size(), 4u);
  for (const std::string& n : names) {
    const ExperimentConfig e = Config::from_preset(n).resolve();
    EXPECT_FALSE(e.name.empty()) << n;
  }
  const ExperimentConfig tg = Config::from_preset("fig3-tg-desk").resolve();
  EXPECT_EQ(tg.name, "fig3-tg-desk");
  EXPECT_EQ(tg.n_particles, 18u);
  EXPECT_EQ(tg.model, GasModel::kTonks);
  EXPECT_EQ(tg.trap.kind, TrapKind::kFlatBottom);  // inherited from the base
  EXPECT_EQ(tg.monitor.policy, BoundaryPolicy::kWarn);
  const ExperimentConfig rnd = Config::from_preset("fig3-random-desk").resolve();
  EXPECT_EQ(rnd.kick.kind, KickKind::kRandom);
  EXPECT_EQ(rnd.realizations, 10);
  EXPECT_EQ(rnd.kick.jitter, 0.5);
  const ExperimentConfig prod = Config::from_preset("production").resolve();
  EXPECT_FALSE(prod.desk_scale);
  EXPECT_EQ(prod.n_dim, 10000u);
  EXPECT_THROW(Config::from_preset("../etc/passwd"), ConfigError);
  EXPECT_THROW(Config::from_preset("nope"), ConfigError);
}

TEST(Config, BoxLengthSnapsToLattice) {
  const ExperimentConfig e = Config().resolve();
  const double cells = e.box_length() / e.physical.lattice_constant;
  EXPECT_NEAR(cells, std::round(cells), 1e-9);
  Config c;
  c.set("grid.snap_to_lattice", "false");
  EXPECT_EQ(c.resolve().box_length(), 300e-6);
}

}  // namespace
}  // namespace qkr
