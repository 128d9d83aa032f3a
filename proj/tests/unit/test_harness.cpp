#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qkr/error.hpp"
#include "qkr/harness.hpp"
#include "qkr/tonks.hpp"

namespace qkr {
namespace {

namespace fs = std::filesystem;

// Small, fast configuration: 60 um box, narrow flat-bottom trap.
Config small(const std::string& model) {
  Config c = Config::from_text(
      "name = small\n"
      "grid.n_dim = 1024\n"
      "grid.length = 60e-6\n"
      "trap.w1 = 20e-6\n"
      "trap.w2 = 9e-6\n"
      "kick.n_kicks = 24\n"
      "kick.sub_steps = 4\n"
      "record.series_step = 4\n"
      "record.snapshot_start = 1\n"
      "record.snapshot_step = 10\n"
      "observables.jsd_lag = 8\n"
      "observables.contact_k_min = 3\n"
      "monitor.boundary_policy = warn\n"
      "analysis.window_lo = 8\n"
      "analysis.window_hi = 24\n");
  c.set("gas.model", model);
  if (model == "tonks") c.set("gas.n_particles", "4");
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::uintmax_t> manifest_files(const fs::path& dir) {
  std::map<std::string, std::uintmax_t> out;
  std::ifstream in(dir / "manifest.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("file.", 0) != 0) continue;
    const auto eq = line.find(" = ");
    out[line.substr(5, eq - 5)] = std::stoull(line.substr(eq + 3));
  }
  return out;
}

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("qkr_harness_" +
             std::string(::testing::UnitTest::GetInstance()
                             ->current_test_info()
                             ->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

TEST_F(HarnessTest, Gamma0RunWritesCompleteManifest) {
  const RunManifest m = run_experiment_in(small("gamma0"), (root_ / "a").string());
  const ExperimentConfig cfg = small("gamma0").resolve();
  EXPECT_EQ(m.series.size(), cfg.record_kicks().size());
  const auto files = manifest_files(root_ / "a");
  EXPECT_TRUE(files.count("series.csv"));
  for (long s : cfg.snapshot_kicks()) {
    EXPECT_TRUE(files.count("nk_" + std::to_string(s) + ".csv")) << s;
    EXPECT_TRUE(files.count("g1_" + std::to_string(s) + ".csv")) << s;
  }
  for (const auto& [name, bytes] : files) {
    ASSERT_TRUE(fs::exists(root_ / "a" / name)) << name;
    EXPECT_EQ(fs::file_size(root_ / "a" / name), bytes) << name;
  }
  EXPECT_EQ(files.size(), m.files.size());
  const std::string manifest = slurp(root_ / "a" / "manifest.txt");
  EXPECT_NE(manifest.find("config_hash = " + small("gamma0").hash()),
            std::string::npos);
  EXPECT_NE(manifest.find("diagnostics.max_boundary_occupancy"),
            std::string::npos);
  EXPECT_NE(manifest.find("diagnostics.max_orthonormality_defect"),
            std::string::npos);
  EXPECT_TRUE(m.localized_valid);
}

TEST_F(HarnessTest, RunsAreByteIdentical) {
  run_experiment_in(small("tonks"), (root_ / "a").string());
  run_experiment_in(small("tonks"), (root_ / "b").string());
  for (const auto& e : fs::directory_iterator(root_ / "a")) {
    const std::string name = e.path().filename().string();
    if (name == "manifest.txt") continue;
    EXPECT_EQ(slurp(e.path()), slurp(root_ / "b" / name)) << name;
  }
}

TEST_F(HarnessTest, RandomKickRunsDependOnlyOnSeed) {
  Config c = small("gamma0");
  c.set("kick.kind", "random");
  c.set("kick.realizations", "2");
  run_experiment_in(c, (root_ / "a").string());
  run_experiment_in(c, (root_ / "b").string());
  c.set("kick.seed", "99");
  run_experiment_in(c, (root_ / "c").string());
  EXPECT_EQ(slurp(root_ / "a" / "series.csv"), slurp(root_ / "b" / "series.csv"));
  EXPECT_NE(slurp(root_ / "a" / "series.csv"), slurp(root_ / "c" / "series.csv"));
}

TEST_F(HarnessTest, TonksRunFillsSnapshotColumnsAndDumpsObdm) {
  Config c = small("tonks");
  c.set("obdm.dump", "true");
  c.set("obdm.svn_modes", "256");
  const RunManifest m = run_experiment_in(c, (root_ / "t").string());
  const ExperimentConfig cfg = c.resolve();
  const auto rows = read_series_csv((root_ / "t" / "series.csv").string());
  ASSERT_EQ(rows.size(), m.series.size());
  for (const SeriesRow& r : rows) {
    EXPECT_TRUE(std::isfinite(r.energy_er));
    if (cfg.is_snapshot(r.n_p)) {
      EXPECT_TRUE(std::isfinite(r.s_vn_raw)) << r.n_p;
      EXPECT_TRUE(std::isfinite(r.s_info)) << r.n_p;
      EXPECT_EQ(r.fit_model, "exponential");
    } else {
      EXPECT_TRUE(std::isnan(r.s_vn_raw)) << r.n_p;
    }
  }
  EXPECT_LT(m.max_trace_defect, 1e-8);
  EXPECT_LT(m.max_hermiticity, 1e-10);
  EXPECT_LT(m.max_density_mismatch, 1e-12);
  const auto dump = root_ / "t" / "obdm_11.bin";
  ASSERT_TRUE(fs::exists(dump));
  EXPECT_EQ(fs::file_size(dump), 16u + 1024u * 1024u * 16u);
  const Prepared p = prepare(cfg);
  const Obdm back = read_obdm(dump.string(), p.grid);
  EXPECT_EQ(back.n_particles, 4u);
  EXPECT_NEAR(back.rho.trace().real(), 4.0, 1e-9);
}

TEST_F(HarnessTest, CsvReadersRoundTrip) {
  run_experiment_in(small("gamma0"), (root_ / "a").string());
  const MomentumDist d = read_momentum_csv((root_ / "a" / "nk_11.csv").string());
  EXPECT_NEAR(d.total(), 1.0, 1e-12);
  const CorrFunction g = read_g1_csv((root_ / "a" / "g1_11.csv").string());
  EXPECT_EQ(g.g1.front(), 1.0);
  EXPECT_THROW(read_momentum_csv((root_ / "a" / "missing.csv").string()),
               ConfigError);
}

TEST_F(HarnessTest, RunDirectoryLayout) {
  Config c = small("gamma0");
  c.set("output.dir", root_.string());
  const RunManifest m = run_experiment(c);
  const fs::path dir(m.out_dir);
  EXPECT_EQ(dir.parent_path().filename(), "small");
  EXPECT_EQ(dir.parent_path().parent_path(), root_);
  EXPECT_TRUE(fs::exists(dir / "series.csv"));
  EXPECT_NE(make_run_dir(root_.string(), "small"), m.out_dir);
}

TEST_F(HarnessTest, SweepIsolatesFailures) {
  const auto entries =
      sweep(small("gamma0"), "n_dim", {"512", "abc", "1024"}, root_.string());
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_TRUE(entries[0].ok);
  EXPECT_FALSE(entries[1].ok);
  EXPECT_FALSE(entries[1].error.empty());
  EXPECT_TRUE(entries[2].ok);
  const std::string summary = slurp(root_ / "summary.csv");
  EXPECT_NE(summary.find("abc,false"), std::string::npos);
  EXPECT_NE(summary.find("1024,true"), std::string::npos);
  EXPECT_THROW(sweep_key("kick.splitting"), ConfigError);
  EXPECT_EQ(sweep_key("N"), "gas.n_particles");
}

TEST_F(HarnessTest, StrictBoundaryPolicyAbortsWithKick) {
  Config c = small("gamma0");
  c.set("monitor.boundary_policy", "error");
  c.set("grid.length", "15e-6");
  try {
    run_experiment_in(c, (root_ / "x").string());
    FAIL() << "expected a boundary error";
  } catch (const BoundaryError& e) {
    EXPECT_GE(e.kick(), 0);
    EXPECT_EQ(e.exit_code(), ExitCode::kInvariant);
  }
}

}  // namespace
}  // namespace qkr
