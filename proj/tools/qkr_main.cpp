// qkr: kicked Lieb-Liniger rotor in the gamma = 0 and Tonks-Girardeau limits.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkr/config.hpp"
#include "qkr/error.hpp"
#include "qkr/floquet.hpp"
#include "qkr/harness.hpp"
#include "qkr/observables.hpp"
#include "qkr/oracle.hpp"
#include "qkr/tonks.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool verbose = false;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config_path, "Configuration file");
  sub->add_option("--preset", a.preset, "Preset name (see presets/)");
  sub->add_option("--out", a.out, "Output root directory");
  sub->add_option("--set", a.sets, "Override, key=value (repeatable)");
  sub->add_option("--seed", a.seed, "Random-kick seed")
      ->each([&a](const std::string&) { a.seed_given = true; });
  sub->add_flag("-v,--verbose", a.verbose, "Progress on stderr");
}

qkr::Config load(const CommonArgs& a) {
  qkr::Config c;
  if (!a.preset.empty()) c = qkr::Config::from_preset(a.preset);
  if (!a.config_path.empty()) {
    const qkr::Config file = qkr::Config::from_file(a.config_path);
    for (const auto& [k, v] : file.entries()) c.set(k, v);
  }
  for (const std::string& s : a.sets) c.set_assignment(s);
  if (a.seed_given) c.set("kick.seed", std::to_string(a.seed));
  if (!a.out.empty()) c.set("output.dir", a.out);
  c.resolve();  // validate early
  return c;
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int cmd_derive(const CommonArgs& a) {
  const qkr::ExperimentConfig cfg = load(a).resolve();
  const qkr::ScaledParams s = cfg.scaled();
  std::printf("recoil_rate_per_s = %.10g\n", s.recoil_rate);
  std::printf("hbar_eff = %.10g\n", s.hbar_eff);
  std::printf("kappa = %.10g\n", s.kappa);
  std::printf("K = %.10g\n", s.K);
  std::printf("pulse_fraction = %.10g\n", s.pulse_fraction);
  std::printf("K_used = %.10g\n", cfg.kick.K);
  std::printf("box_length_m = %.10g\n", cfg.box_length());
  std::printf("box_length_a = %.10g\n",
              cfg.box_length() / cfg.physical.lattice_constant);
  return 0;
}

int cmd_ground(const CommonArgs& a) {
  const qkr::Config config = load(a);
  const qkr::ExperimentConfig cfg = config.resolve();
  const qkr::Prepared p = qkr::prepare(cfg);
  std::printf("eigen_residual = %.3e\neigen_overlap = %.3e\n",
              p.levels.max_residual, p.levels.max_overlap);
  for (std::size_t i = 0; i < p.levels.energies.size(); ++i) {
    std::printf("level %zu: %.12g E_r\n", i, p.levels.energies[i]);
  }
  const qkr::MomentumDist fermi = qkr::momentum_dist_fermions(p.levels.orbitals);
  std::printf("kinetic_energy_er = %.12g\n", qkr::kinetic_energy(fermi));

  const std::string dir =
      (fs::path(qkr::make_run_dir(cfg.output_dir, cfg.name)) / "ground_state")
          .string();
  fs::create_directories(dir);
  qkr::MomentumDist dist = fermi;
  qkr::CorrFunction g1;
  if (cfg.model == qkr::GasModel::kTonks) {
    const qkr::Obdm rho = qkr::compute_obdm(
        qkr::SlaterState::from_orbitals(p.levels.orbitals));
    dist = qkr::momentum_dist_obdm(rho);
    g1 = qkr::g1_from_obdm(rho);
  } else {
    g1 = qkr::g1_from_momentum(dist, *p.grid);
  }
  std::printf("n_k_peak = %.12g\n",
              *std::max_element(dist.density.begin(), dist.density.end()));
  for (const qkr::DecayModel m :
       {qkr::DecayModel::kExponential, qkr::DecayModel::kLorentzian,
        qkr::DecayModel::kAlgebraic}) {
    try {
      const qkr::FitResult f =
          qkr::fit_decay(g1, m, cfg.fit_z_min, cfg.fit_z_max);
      std::printf("fit %s: param %.6g residual %.6g\n",
                  qkr::to_string(m).c_str(), f.param, f.residual_rms);
    } catch (const qkr::Error& e) {
      std::printf("fit %s: %s\n", qkr::to_string(m).c_str(), e.what());
    }
  }
  qkr::write_two_columns(dir + "/nk_0.csv", "k_over_kl,n_k", dist.k_values,
                         dist.density);
  qkr::write_two_columns(dir + "/g1_0.csv", "z_over_a,g1", g1.z_values, g1.g1);
  std::vector<double> z(p.grid->size()), dens(p.grid->size(), 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = qkr::Grid::z_over_a(p.grid->zeta(j));
    for (const qkr::Orbital& o : p.levels.orbitals) {
      dens[j] += std::norm(o.amplitudes[static_cast<long>(j)]);
    }
  }
  qkr::write_two_columns(dir + "/density.csv", "z_over_a,density", z, dens);
  std::printf("wrote %s\n", dir.c_str());
  return 0;
}

int cmd_run(const CommonArgs& a) {
  const qkr::Config config = load(a);
  const qkr::RunManifest m = qkr::run_experiment(config, {a.verbose});
  std::printf("run_dir = %s\n", m.out_dir.c_str());
  if (m.localized_valid) {
    std::printf("localized_energy_er = %.8g\nlocalized_drift = %.6g\n",
                m.localized.mean, m.localized.drift);
  }
  for (const std::string& w : m.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& axis,
              const std::string& values) {
  const qkr::Config config = load(a);
  const qkr::ExperimentConfig cfg = config.resolve();
  const std::string key = qkr::sweep_key(axis);
  const std::string root =
      qkr::make_run_dir(cfg.output_dir, cfg.name + "-sweep-" + key);
  const auto entries =
      qkr::sweep(config, axis, split_values(values), root, {a.verbose});
  std::printf("sweep_root = %s\n", root.c_str());
  bool all_ok = true;
  for (const qkr::SweepEntry& e : entries) {
    if (e.ok && e.manifest.localized_valid) {
      std::printf("%s = %s: localized %.8g drift %.4g\n", key.c_str(),
                  e.value.c_str(), e.manifest.localized.mean,
                  e.manifest.localized.drift);
    } else if (e.ok) {
      std::printf("%s = %s: ok (run shorter than the window)\n", key.c_str(),
                  e.value.c_str());
    } else {
      all_ok = false;
      std::printf("%s = %s: FAILED %s\n", key.c_str(), e.value.c_str(),
                  e.error.c_str());
    }
  }
  return all_ok ? 0 : static_cast<int>(qkr::ExitCode::kInvariant);
}

int cmd_oracle(const std::string& mode, int cases, std::uint64_t seed,
               double kappa) {
  if (mode == "bessel") {
    // Free space, delta kick, from rest: populations J_n(kappa)^2.
    const double hbar = 4.0;
    const std::size_t n = 256;
    auto grid = qkr::Grid::make_scaled(n, 2.0 * M_PI * 8.0);
    qkr::KickSchedule ks;
    ks.kind = qkr::KickKind::kPeriodicDelta;
    ks.n_kicks = 1;
    ks.K = kappa * hbar;
    const qkr::FloquetPropagator prop(grid, Eigen::VectorXd::Zero(n), hbar, ks);
    qkr::Orbital rest(grid, Eigen::VectorXcd::Constant(
                                n, 1.0 / std::sqrt(grid->span())));
    qkr::EvolveOptions eo;
    eo.monitor.policy = qkr::BoundaryPolicy::kOff;  // a plane wave fills the box
    const auto snaps = qkr::evolve({rest}, prop, {1}, eo);
    const qkr::MomentumDist d = qkr::momentum_dist_single(snaps[0].orbitals[0]);
    const int n_max = 10;
    const std::vector<double> ref = qkr::oracle::bessel_one_kick(kappa, n_max);
    double worst = 0.0;
    for (int m = -n_max; m <= n_max; ++m) {
      // q = m is bin m * span / (2 pi) above zero; k / k_L = 2 m.
      const auto a = static_cast<std::size_t>(
          std::lround(2.0 * m / d.dk) + static_cast<long>(d.size() / 2));
      const double p = d.probability(a);
      const double r = ref[static_cast<std::size_t>(m + n_max)];
      worst = std::max(worst, std::abs(p - r));
      std::printf("n = %3d  P = %.15f  J^2 = %.15f\n", m, p, r);
    }
    std::printf("max_abs_error = %.3e (tolerance 1e-10)\n", worst);
    return worst < 1e-10 ? 0 : static_cast<int>(qkr::ExitCode::kInvariant);
  }
  if (mode == "obdm-n2") {
    auto grid = qkr::Grid::make_scaled(64, 2.0 * M_PI * 8.0);
    double worst_brute = 0.0, worst_ref = 0.0;
    for (int c = 0; c < cases; ++c) {
      const auto orbs = qkr::oracle::random_orbitals(grid, 2, seed + c);
      const qkr::SlaterState st = qkr::SlaterState::from_orbitals(orbs);
      const qkr::Obdm fast = qkr::compute_obdm(st);
      const qkr::Obdm brute = qkr::oracle::brute_obdm_n2(orbs[0], orbs[1]);
      const Eigen::MatrixXcd g_ref = qkr::green_function_reference(st);
      const Eigen::MatrixXcd g_fast = qkr::green_function(st);
      const double db = (fast.rho - brute.rho).cwiseAbs().maxCoeff();
      const double dr = (g_fast - g_ref).cwiseAbs().maxCoeff();
      worst_brute = std::max(worst_brute, db);
      worst_ref = std::max(worst_ref, dr);
      std::printf("case %2d: |JWT - brute| = %.3e  |fast - reference| = %.3e\n",
                  c, db, dr);
    }
    std::printf("max |JWT - brute| = %.3e (tolerance 1e-8)\n", worst_brute);
    std::printf("max |fast - reference| = %.3e (tolerance 1e-10)\n", worst_ref);
    return worst_brute < 1e-8 && worst_ref < 1e-10
               ? 0
               : static_cast<int>(qkr::ExitCode::kInvariant);
  }
  throw qkr::ConfigError("unknown oracle mode '" + mode +
                         "' (obdm-n2, bessel)");
}

int cmd_compare(const std::string& a, const std::string& b) {
  const qkr::MomentumDist p = qkr::read_momentum_csv(a);
  const qkr::MomentumDist q = qkr::read_momentum_csv(b);
  std::printf("jsd = %.12g\n", qkr::jsd(p, q));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkr: kicked Lieb-Liniger rotor (gamma = 0 and Tonks limits)"};
  app.require_subcommand(1);

  CommonArgs common;
  auto* derive = app.add_subcommand("derive-params", "Print scaled constants");
  add_common(derive, common);
  auto* ground = app.add_subcommand("ground-state", "Trap eigenstates and g1");
  add_common(ground, common);
  auto* run = app.add_subcommand("run", "Run one experiment");
  add_common(run, common);
  auto* sweep = app.add_subcommand("sweep", "One run per axis value");
  add_common(sweep, common);
  std::string axis, values;
  sweep->add_option("--axis", axis, "n_dim, N, trap.kind or kick.K")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force reference checks");
  std::string mode;
  int cases = 20;
  std::uint64_t oseed = 1;
  double kappa = 0.8324;
  oracle->add_option("--mode", mode, "obdm-n2 or bessel")->required();
  oracle->add_option("--cases", cases, "Random cases for obdm-n2");
  oracle->add_option("--seed", oseed, "First seed for obdm-n2");
  oracle->add_option("--kappa", kappa, "Kick strength K / hbar_eff for bessel");

  auto* compare = app.add_subcommand("compare", "JSD between two nk files");
  std::string file_a, file_b;
  compare->add_option("a", file_a, "First nk_<np>.csv")->required();
  compare->add_option("b", file_b, "Second nk_<np>.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(qkr::ExitCode::kConfig);
  }

  try {
    if (*derive) return cmd_derive(common);
    if (*ground) return cmd_ground(common);
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common, axis, values);
    if (*oracle) return cmd_oracle(mode, cases, oseed, kappa);
    if (*compare) return cmd_compare(file_a, file_b);
  } catch (const qkr::Error& e) {
    std::fprintf(stderr, "qkr: %s\n", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qkr: %s\n", e.what());
    return 1;
  }
  return 0;
}
