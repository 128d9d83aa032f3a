// Acceptance run: one PASS/FAIL line per criterion 1-10. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "qkr/config.hpp"
#include "qkr/error.hpp"
#include "qkr/floquet.hpp"
#include "qkr/harness.hpp"
#include "qkr/observables.hpp"
#include "qkr/oracle.hpp"
#include "qkr/tonks.hpp"
#include "qkr/units.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qkr;

int g_failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s  %s [%s]\n", id, ok ? "PASS" : "FAIL",
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string f(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Runs a preset into `dir` unless a finished run is already there.
RunManifest run_or_reuse(const Config& c, const fs::path& dir, bool reuse) {
  if (reuse && fs::exists(dir / "manifest.txt")) {
    RunManifest m;
    m.out_dir = dir.string();
    m.series = read_series_csv((dir / "series.csv").string());
    return m;
  }
  fs::remove_all(dir);
  std::printf("# running %s into %s\n", c.get("name").c_str(),
              dir.string().c_str());
  std::fflush(stdout);
  return run_experiment_in(c, dir.string());
}

const SeriesRow& row_at(const std::vector<SeriesRow>& s, long n_p) {
  for (const SeriesRow& r : s) {
    if (r.n_p == n_p) return r;
  }
  throw ConfigError("series has no row for N_p = " + std::to_string(n_p));
}

WindowStats window(const std::vector<SeriesRow>& s, double SeriesRow::*col,
                   long lo, long hi) {
  std::vector<long> k;
  std::vector<double> v;
  for (const SeriesRow& r : s) {
    if (std::isnan(r.*col)) continue;
    k.push_back(r.n_p);
    v.push_back(r.*col);
  }
  return localized_window_mean(k, v, lo, hi);
}

double residual(const fs::path& g1_file, DecayModel m, double lo, double hi) {
  return fit_decay(read_g1_csv(g1_file.string()), m, lo, hi).residual_rms;
}

void criterion1() {
  PhysicalParams p = cesium_1064();
  const double k60 = derive_scaled(p).K;
  p.kick_period = 80e-6;
  const double k80 = derive_scaled(p).K;
  const bool ok = std::abs(k60 / 3.3 - 1.0) <= 0.02 &&
                  std::abs(k80 / 4.4 - 1.0) <= 0.02;
  report(1, ok, "kick strength K(60us)=3.3, K(80us)=4.4 within 2%",
         "K60=" + f("%.4f", k60) + " K80=" + f("%.4f", k80));
}

void criterion2() {
  const double hbar = 4.0;
  const double kappa = derive_scaled(cesium_1064()).kappa;
  auto g = Grid::make_scaled(256, 2.0 * std::numbers::pi * 8.0);
  KickSchedule ks;
  ks.kind = KickKind::kPeriodicDelta;
  ks.n_kicks = 1;
  ks.K = kappa * hbar;
  const FloquetPropagator prop(g, Eigen::VectorXd::Zero(256), hbar, ks);
  Orbital rest(g, Eigen::VectorXcd::Constant(256, 1.0 / std::sqrt(g->span())));
  EvolveOptions eo;
  eo.monitor.policy = BoundaryPolicy::kOff;
  const MomentumDist d =
      momentum_dist_single(evolve({rest}, prop, {1}, eo)[0].orbitals[0]);
  const auto ref = oracle::bessel_one_kick(kappa, 10);
  double worst = 0.0;
  for (int n = -10; n <= 10; ++n) {
    const auto a = static_cast<std::size_t>(128 + 8 * n);
    worst = std::max(worst, std::abs(d.probability(a) -
                                     ref[static_cast<std::size_t>(n + 10)]));
  }
  report(2, worst <= 1e-10, "one-kick Bessel populations |n|<=10 to 1e-10",
         "max error " + f("%.2e", worst) + ", P0=" + f("%.4f", ref[10]));
}

void criterion3() {
  auto g = Grid::make_scaled(64, 2.0 * std::numbers::pi * 8.0);
  double brute = 0.0, ref = 0.0;
  for (unsigned c = 0; c < 20; ++c) {
    const auto orbs = oracle::random_orbitals(g, 2, 500 + c);
    const SlaterState s = SlaterState::from_orbitals(orbs);
    const Obdm rho = compute_obdm(s);
    brute = std::max(brute, (rho.rho - oracle::brute_obdm_n2(orbs[0], orbs[1]).rho)
                                .cwiseAbs()
                                .maxCoeff());
    ref = std::max(ref, (green_function(s) - green_function_reference(s))
                            .cwiseAbs()
                            .maxCoeff());
  }
  report(3, brute <= 1e-8 && ref <= 1e-10,
         "20 random N=2 cases: JWT vs brute 1e-8, fast vs reference 1e-10",
         "JWT-brute " + f("%.2e", brute) + ", fast-reference " + f("%.2e", ref));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = "acceptance_runs";
  bool reuse = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else if (a == "--reuse") {
      reuse = true;
    } else {
      std::fprintf(stderr, "usage: acceptance [--work DIR] [--reuse]\n");
      return 2;
    }
  }
  fs::create_directories(work);

  try {
    criterion1();
    criterion2();
    criterion3();

    // Runs shared by criteria 4-10.
    const Config gamma_cfg = Config::from_preset("fig2-gamma0-desk");
    const Config tg_cfg = Config::from_preset("fig3-tg-desk");
    const Config rnd_cfg = Config::from_preset("fig3-random-desk");
    const RunManifest gamma = run_or_reuse(gamma_cfg, work / "gamma0", reuse);
    const RunManifest tg = run_or_reuse(tg_cfg, work / "tg", reuse);
    const RunManifest rnd = run_or_reuse(rnd_cfg, work / "random", reuse);
    const fs::path gdir = gamma.out_dir, tdir = tg.out_dir;

    // 4. gamma = 0 localization.
    const WindowStats ge = window(gamma.series, &SeriesRow::energy_er, 400, 800);
    double jsd_late = 0.0;
    for (const SeriesRow& r : gamma.series) {
      if (r.n_p >= 300 && r.n_p <= 800 && !std::isnan(r.jsd_prev)) {
        jsd_late = std::max(jsd_late, r.jsd_prev);
      }
    }
    report(4, std::abs(ge.drift) < 0.05 && jsd_late < 1e-3,
           "gamma=0: energy drift [400,600] vs [600,800] < 5%; "
           "J(N_p, N_p-100) < 1e-3 for N_p >= 300",
           "E=" + f("%.4f", ge.mean) + " E_r, drift " + f("%.4f", ge.drift) +
               ", max J after 300 = " + f("%.3e", jsd_late));

    // 5. Tonks-Girardeau localization: onset, plateau, grid convergence.
    const WindowStats te = window(tg.series, &SeriesRow::energy_er, 400, 800);
    long onset = -1;
    for (std::size_t i = tg.series.size(); i-- > 0;) {
      if (tg.series[i].energy_er < 0.9 * te.mean) {
        onset = i + 1 < tg.series.size() ? tg.series[i + 1].n_p : -1;
        break;
      }
    }
    Config sweep_cfg = tg_cfg;
    sweep_cfg.set("obdm.enabled", "false");
    const fs::path sroot = work / "tg-sweep";
    std::vector<SweepEntry> sw;
    if (reuse && fs::exists(sroot / "summary.csv")) {
      for (const std::string v : {"8192", "16384"}) {
        SweepEntry e;
        e.value = v;
        e.ok = true;
        e.manifest.series = read_series_csv(
            (sroot / ("grid.n_dim-" + v) / "series.csv").string());
        e.manifest.localized =
            window(e.manifest.series, &SeriesRow::energy_er, 400, 800);
        e.manifest.localized_valid = true;
        sw.push_back(e);
      }
    } else {
      fs::remove_all(sroot);
      std::printf("# sweeping n_dim for the Tonks plateau\n");
      std::fflush(stdout);
      sw = sweep(sweep_cfg, "n_dim", {"8192", "16384"}, sroot.string());
    }
    const bool sweep_ok = sw.size() == 2 && sw[0].ok && sw[1].ok;
    const double move =
        sweep_ok ? std::abs(sw[1].manifest.localized.mean /
                                sw[0].manifest.localized.mean -
                            1.0)
                 : kNaN;
    const bool onset_ok = onset >= 350 && onset <= 650;
    const bool plateau_ok = te.mean >= 0.7 * 9.0 && te.mean <= 1.3 * 9.0;
    const bool conv_ok = sweep_ok && move < 0.02;
    report(5, onset_ok && plateau_ok && conv_ok,
           "TG N=18: onset 500+-30% (E stays >= 90% of plateau), plateau "
           "9 E_r +-30%, n_dim 8192->16384 moves plateau < 2%",
           "onset " + std::to_string(onset) + (onset_ok ? " ok" : " out") +
               ", plateau " + f("%.4f", te.mean) + " E_r" +
               (plateau_ok ? " ok" : " out") + ", drift " +
               f("%.4f", te.drift) + ", sweep move " + f("%.4f", move) +
               (conv_ok ? " ok" : " out"));

    // 6. Random-kick control.
    const double e500 = row_at(rnd.series, 500).energy_er;
    std::vector<double> block;
    for (long b = 0; b < 5; ++b) {
      double s = 0.0;
      int n = 0;
      for (const SeriesRow& r : rnd.series) {
        if (r.n_p > 100 * b && r.n_p <= 100 * (b + 1)) {
          s += r.energy_er;
          ++n;
        }
      }
      block.push_back(s / n);
    }
    const bool monotone = std::is_sorted(block.begin(), block.end()) &&
                          std::adjacent_find(block.begin(), block.end()) ==
                              block.end();
    const WindowStats re = window(rnd.series, &SeriesRow::energy_er, 300, 500);
    report(6, monotone && e500 >= 3.0 * ge.mean && std::abs(re.drift) >= 0.05,
           "random kicks: 100-kick block means increase, E(500) >= 3x gamma=0 "
           "plateau, drift test fails",
           "E(500)=" + f("%.1f", e500) + " E_r vs 3x" + f("%.3f", ge.mean) +
               ", blocks " + f("%.1f", block.front()) + ".." +
               f("%.1f", block.back()) + (monotone ? " rising" : " not rising") +
               ", drift " + f("%.3f", re.drift));

    // 7. Correlation dichotomy.
    bool ok7 = true;
    std::string d7;
    const double half_box =
        0.5 * tg_cfg.resolve().box_length() / tg_cfg.resolve().physical.lattice_constant;
    for (const long n : {601L, 801L}) {
      const fs::path tgf = tdir / ("g1_" + std::to_string(n) + ".csv");
      const double te_res = residual(tgf, DecayModel::kExponential, 0.25, 2.5);
      const double tl_res = residual(tgf, DecayModel::kLorentzian, 0.25, 2.5);
      const fs::path gf = gdir / ("g1_" + std::to_string(n) + ".csv");
      const double ge_res = residual(gf, DecayModel::kExponential, 0.0, half_box);
      const double gl_res = residual(gf, DecayModel::kLorentzian, 0.0, half_box);
      ok7 = ok7 && te_res < tl_res && gl_res < ge_res;
      d7 += "N_p=" + std::to_string(n) + " TG exp/lor " + f("%.3g", te_res) +
            "/" + f("%.3g", tl_res) + ", gamma0 lor/exp " + f("%.4g", gl_res) +
            "/" + f("%.4g", ge_res) + "; ";
    }
    // Ground state: window from half the interparticle spacing to the rms
    // cloud radius, both from the ground-state density.
    const Prepared prep = prepare(tg_cfg.resolve());
    const Grid& grid = *prep.grid;
    double peak = 0.0, total = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double dens = 0.0;
      for (const Orbital& o : prep.levels.orbitals) {
        dens += std::norm(o.amplitudes[static_cast<long>(j)]);
      }
      const double per_a = dens * 2.0 * std::numbers::pi;  // atoms per a
      const double z = Grid::z_over_a(grid.zeta(j));
      const double w = per_a * Grid::z_over_a(grid.dz());
      peak = std::max(peak, per_a);
      total += w;
      m2 += z * z * w;
    }
    const double spacing = 1.0 / peak, radius = std::sqrt(m2 / total);
    const fs::path g0 = tdir / "g1_0.csv";
    const double ga = residual(g0, DecayModel::kAlgebraic, 0.5 * spacing, radius);
    const double gx = residual(g0, DecayModel::kExponential, 0.5 * spacing, radius);
    ok7 = ok7 && ga < gx;
    d7 += "ground state on [" + f("%.2f", 0.5 * spacing) + ", " +
          f("%.1f", radius) + "] alg/exp " + f("%.4g", ga) + "/" +
          f("%.4g", gx);
    report(7, ok7,
           "g1: TG exp < lorentzian on [0.25,2.5]; gamma=0 lorentzian < exp on "
           "[0, L/2]; TG ground state algebraic < exp",
           d7);

    // 8. Contact plateau.
    const double cv_tg = row_at(tg.series, 801).contact_cv;
    const double cv_tg1 = row_at(tg.series, 1).contact_cv;
    const double cv_g0 = row_at(gamma.series, 801).contact_cv;
    report(8, cv_tg < cv_tg1 && cv_tg < cv_g0,
           "k^4 n(k) beyond 6 k_L: TG cv at N_p=801 below N_p=1 and below gamma=0",
           "cv TG801 " + f("%.3f", cv_tg) + ", TG1 " + f("%.3f", cv_tg1) +
               ", gamma0 801 " + f("%.3f", cv_g0));

    // 9. Invariant suite on the production paths.
    bool ok9 = true;
    std::string d9;
    {
      auto g = Grid::make_scaled(512, 2.0 * std::numbers::pi * 32.0);
      const auto orbs = oracle::random_orbitals(g, 6, 77);
      Eigen::VectorXd v(512);
      for (long j = 0; j < 512; ++j) v[j] = 1e-3 * std::pow(g->zeta(j), 2);
      KickSchedule ks;
      ks.n_kicks = 50;
      ks.K = 3.3;
      ks.pulse_fraction = 1.0 / 6.0;
      EvolveOptions eo;
      eo.monitor.policy = BoundaryPolicy::kOff;
      const auto snaps = evolve(orbs, FloquetPropagator(g, v, 4.0, ks), {50}, eo);
      const double ortho = orthonormality_defect(snaps[0].orbitals);
      Obdm rho = compute_obdm(SlaterState::from_orbitals(snaps[0].orbitals));
      const VonNeumann vn = von_neumann_entropy(rho);
      const Orbital back = to_position(to_momentum(orbs[0]));
      const double unitary = (back.amplitudes - orbs[0].amplitudes).cwiseAbs().maxCoeff();
      const MomentumDist p = momentum_dist_single(orbs[0]);
      const MomentumDist q = momentum_dist_single(orbs[1]);
      const double j = jsd(p, q), jr = jsd(q, p);
      CorrFunction syn;
      for (int t = 0; t <= 100; ++t) {
        syn.z_values.push_back(0.05 * t);
        syn.g1.push_back(0.8 * std::exp(-0.05 * t / 1.7));
      }
      const double r = fit_decay(syn, DecayModel::kExponential, 0.25, 2.5).param;
      ok9 = ortho < 1e-10 && rho.checks.hermiticity < 1e-10 &&
            rho.checks.trace_defect < 1e-8 && vn.min_eigenvalue > -1e-8 &&
            unitary < 1e-12 && j >= 0.0 && j <= 1.0 && std::abs(j - jr) <= 1e-15 &&
            std::abs(r - 1.7) < 1e-8;
      d9 = "orthonormality " + f("%.1e", ortho) + ", hermiticity " +
           f("%.1e", rho.checks.hermiticity) + ", trace " +
           f("%.1e", rho.checks.trace_defect) + ", min eig " +
           f("%.1e", vn.min_eigenvalue) + ", transform " + f("%.1e", unitary) +
           ", J sym " + f("%.1e", std::abs(j - jr)) + ", fit r " + f("%.10f", r);
    }
    report(9, ok9, "invariants: norm, OBDM, JSD, transform, fit recovery "
                   "(full property suite runs under ctest)", d9);

    // 10. Entropy trends on the TG snapshots.
    std::vector<double> s_info, s_vn;
    for (const SeriesRow& r : tg.series) {
      if (std::isnan(r.s_vn_unit_trace)) continue;
      s_info.push_back(r.s_info);
      s_vn.push_back(r.s_vn_unit_trace);
    }
    const double rho_s = spearman(s_info, s_vn);
    const WindowStats wi = window(tg.series, &SeriesRow::s_info, 400, 800);
    const WindowStats wv = window(tg.series, &SeriesRow::s_vn_unit_trace, 400, 800);
    report(10, rho_s > 0.95 && std::abs(wi.drift) < 0.05 && std::abs(wv.drift) < 0.05,
           "TG S_info vs S_vN Spearman > 0.95; both pass the 5% drift test",
           "spearman " + f("%.4f", rho_s) + " over " +
               std::to_string(s_info.size()) + " snapshots, drift S_info " +
               f("%.4f", wi.drift) + ", S_vN " + f("%.4f", wv.drift));
  } catch (const Error& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 100;
  }
  std::printf("acceptance: %d of 10 criteria failed\n", g_failures);
  return g_failures;
}
