#include "qkr/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qkr/error.hpp"
#include "qkr/tonks.hpp"

#ifndef QKR_VERSION
#define QKR_VERSION "0.0.0"
#endif

namespace qkr {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string utc_stamp(const char* pattern) {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, pattern, &tm);
  return buf;
}

std::vector<double> probabilities(const MomentumDist& d) {
  std::vector<double> p(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) p[a] = d.probability(a);
  return p;
}

void write_series(const std::string& path, const std::vector<SeriesRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "n_p,energy_er,s_info,s_vn_raw,s_vn_unit_trace,jsd_prev,contact,"
         "contact_cv,fit_model,fit_param,fit_residual\n";
  for (const SeriesRow& r : rows) {
    out << r.n_p << ',' << fmt(r.energy_er) << ',' << fmt(r.s_info) << ','
        << fmt(r.s_vn_raw) << ',' << fmt(r.s_vn_unit_trace) << ','
        << fmt(r.jsd_prev) << ',' << fmt(r.contact) << ','
        << fmt(r.contact_cv) << ',' << r.fit_model << ','
        << fmt(r.fit_param) << ',' << fmt(r.fit_residual) << '\n';
  }
}

// Observables shared by both gas models once a distribution and g1 exist.
struct RowContext {
  const ExperimentConfig& cfg;
  const Grid& grid;
  const std::string& dir;
  std::map<long, std::vector<double>>& history;
  RunManifest& manifest;
};

void fill_row(SeriesRow& row, const MomentumDist& dist,
              const CorrFunction& g1, bool write_files, RowContext& ctx) {
  row.s_info = info_entropy(dist);
  std::vector<double> p = probabilities(dist);
  const auto prev = ctx.history.find(row.n_p - ctx.cfg.jsd_lag);
  if (prev != ctx.history.end()) row.jsd_prev = jsd(p, prev->second);
  ctx.history[row.n_p] = std::move(p);
  try {
    const ContactPlateau c =
        contact_plateau(dist, ctx.cfg.contact_k_min, ctx.cfg.contact_k_max);
    row.contact = c.contact;
    row.contact_cv = c.cv;
  } catch (const ConfigError&) {
    // Grid does not reach k_min; leave the columns empty.
  }
  row.fit_model = to_string(ctx.cfg.fit_model);
  try {
    const FitResult f =
        fit_decay(g1, ctx.cfg.fit_model, ctx.cfg.fit_z_min, ctx.cfg.fit_z_max);
    row.fit_param = f.param;
    row.fit_residual = f.residual_rms;
  } catch (const Error& e) {
    ctx.manifest.warnings.push_back("fit at N_p=" + std::to_string(row.n_p) +
                                    ": " + e.what());
  }
  if (write_files) {
    const std::string np = std::to_string(row.n_p);
    const MomentumDist shown =
        ctx.cfg.tof_sigma_k > 0.0 ? tof_blur(dist, ctx.cfg.tof_sigma_k) : dist;
    write_two_columns(ctx.dir + "/nk_" + np + ".csv", "k_over_kl,n_k",
                      shown.k_values, shown.density);
    write_two_columns(ctx.dir + "/g1_" + np + ".csv", "z_over_a,g1",
                      g1.z_values, g1.g1);
  }
}

void write_manifest(const std::string& dir, const Config& config,
                    const ExperimentConfig& cfg, RunManifest& m) {
  // File sizes first so the manifest lists every artifact but itself.
  m.files.clear();
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() == "manifest.txt") continue;
    paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    m.files.push_back({p.filename().string(), fs::file_size(p)});
  }

  std::ofstream out(dir + "/manifest.txt");
  if (!out) throw ConfigError("cannot write manifest in " + dir);
  const ScaledParams s = cfg.scaled();
  out << "# qkr run manifest\n";
  out << "config_hash = " << m.config_hash << '\n';
  out << "code_version = " << m.code_version << '\n';
  out << "started = " << m.started << '\n';
  out << "finished = " << m.finished << '\n';
  out << "wall_seconds = " << fmt(m.wall_seconds) << '\n';
  for (const auto& [k, v] : config.entries()) {
    out << "config." << k << " = " << v << '\n';
  }
  out << "resolved.hbar_eff = " << fmt(s.hbar_eff) << '\n';
  out << "resolved.K = " << fmt(cfg.kick.K) << '\n';
  out << "resolved.kappa = " << fmt(cfg.kick.K / s.hbar_eff) << '\n';
  out << "resolved.pulse_fraction = " << fmt(s.pulse_fraction) << '\n';
  out << "resolved.box_length_m = " << fmt(cfg.box_length()) << '\n';
  out << "resolved.n_dim = " << cfg.n_dim << '\n';
  out << "resolved.gas_model = " << to_string(cfg.model) << '\n';
  out << "resolved.n_particles = " << cfg.n_particles << '\n';
  out << "diagnostics.eigen_residual = " << fmt(m.eigen_residual) << '\n';
  out << "diagnostics.eigen_overlap = " << fmt(m.eigen_overlap) << '\n';
  out << "diagnostics.max_boundary_occupancy = "
      << fmt(m.evolve.max_boundary_occupancy) << '\n';
  out << "diagnostics.worst_boundary_kick = " << m.evolve.worst_boundary_kick
      << '\n';
  out << "diagnostics.boundary_warning = "
      << (m.evolve.boundary_warning ? "true" : "false") << '\n';
  out << "diagnostics.max_orthonormality_defect = "
      << fmt(m.evolve.max_orthonormality_defect) << '\n';
  if (cfg.obdm_enabled) {
    out << "diagnostics.obdm_max_hermiticity = " << fmt(m.max_hermiticity)
        << '\n';
    out << "diagnostics.obdm_max_trace_defect = " << fmt(m.max_trace_defect)
        << '\n';
    out << "diagnostics.obdm_min_eigenvalue = " << fmt(m.min_obdm_eigenvalue)
        << '\n';
    out << "diagnostics.svn_min_kept_trace = " << fmt(m.min_svn_kept_trace)
        << '\n';
    out << "diagnostics.obdm_density_mismatch = "
        << fmt(m.max_density_mismatch) << '\n';
    out << "diagnostics.obdm_seconds = " << fmt(m.obdm_seconds) << '\n';
  }
  if (m.localized_valid) {
    out << "analysis.window = " << cfg.window_lo << "," << cfg.window_hi
        << '\n';
    out << "analysis.localized_energy_er = " << fmt(m.localized.mean) << '\n';
    out << "analysis.localized_drift = " << fmt(m.localized.drift) << '\n';
  }
  for (std::size_t i = 0; i < m.level_energies.size(); ++i) {
    out << "level." << i << "_er = " << fmt(m.level_energies[i]) << '\n';
  }
  for (const std::string& w : m.warnings) out << "warning = " << w << '\n';
  for (const FileEntry& f : m.files) {
    out << "file." << f.name << " = " << f.bytes << '\n';
  }
}

}  // namespace

std::string code_version() { return QKR_VERSION; }

Prepared prepare(const ExperimentConfig& cfg) {
  Prepared p;
  p.grid = Grid::make(cfg.n_dim, cfg.box_length(), cfg.physical.lattice_constant);
  p.scaled = cfg.scaled();
  p.potential = potential_on_grid(cfg.trap, *p.grid, p.scaled);
  const std::size_t n_orb = cfg.model == GasModel::kTonks ? cfg.n_particles : 1;
  p.levels = lowest_eigenstates(p.potential, p.grid, p.scaled.hbar_eff, n_orb);
  return p;
}

std::string make_run_dir(const std::string& root, const std::string& name) {
  const std::string base =
      (fs::path(root) / name / utc_stamp("%Y%m%dT%H%M%SZ")).string();
  std::string dir = base;
  for (int i = 2; fs::exists(dir); ++i) dir = base + "-" + std::to_string(i);
  return dir;
}

RunManifest run_experiment_in(const Config& config, const std::string& run_dir,
                              const RunOptions& options) {
  const ExperimentConfig cfg = config.resolve();
  fs::create_directories(run_dir);
  const auto t0 = Clock::now();

  RunManifest m;
  m.out_dir = run_dir;
  m.config_hash = config.hash();
  m.code_version = code_version();
  m.started = utc_stamp("%Y-%m-%dT%H:%M:%SZ");

  const Prepared prep = prepare(cfg);
  const Grid& grid = *prep.grid;
  m.eigen_residual = prep.levels.max_residual;
  m.eigen_overlap = prep.levels.max_overlap;
  m.level_energies = prep.levels.energies;
  m.min_svn_kept_trace = static_cast<double>(cfg.n_particles);
  if (options.verbose) {
    std::clog << "[qkr] " << cfg.name << ": n_dim=" << cfg.n_dim
              << " K=" << cfg.kick.K << " hbar_eff=" << prep.scaled.hbar_eff
              << " model=" << to_string(cfg.model) << '\n';
  }

  const std::vector<long> records = cfg.record_kicks();
  std::vector<SeriesRow> rows(records.size());
  std::map<long, std::size_t> row_of;
  for (std::size_t i = 0; i < records.size(); ++i) {
    rows[i].n_p = records[i];
    row_of[records[i]] = i;
  }
  std::map<long, std::vector<double>> history;
  RowContext ctx{cfg, grid, run_dir, history, m};

  EvolveOptions eopt;
  eopt.monitor = cfg.monitor;
  eopt.orthonormality_tol = cfg.orthonormality_tol;

  auto merge_diag = [&](const EvolveDiagnostics& d) {
    if (d.max_boundary_occupancy > m.evolve.max_boundary_occupancy) {
      m.evolve.max_boundary_occupancy = d.max_boundary_occupancy;
      m.evolve.worst_boundary_kick = d.worst_boundary_kick;
    }
    m.evolve.max_orthonormality_defect = std::max(
        m.evolve.max_orthonormality_defect, d.max_orthonormality_defect);
    m.evolve.boundary_warning = m.evolve.boundary_warning || d.boundary_warning;
  };

  if (cfg.model == GasModel::kGamma0) {
    std::vector<std::vector<double>> psum(records.size());
    MomentumDist shape;
    for (int r = 0; r < cfg.realizations; ++r) {
      KickSchedule ks = cfg.kick;
      ks.seed = cfg.kick.seed + static_cast<std::uint64_t>(r);
      const FloquetPropagator prop(prep.grid, prep.potential,
                                   prep.scaled.hbar_eff, ks);
      const EvolveDiagnostics d = evolve(
          {prep.levels.orbitals.front()}, prop, records,
          [&](const Snapshot& s) {
            const MomentumDist dist = momentum_dist_single(s.orbitals.front());
            std::vector<double>& acc = psum[row_of.at(s.kick)];
            if (acc.empty()) acc.assign(dist.size(), 0.0);
            for (std::size_t a = 0; a < dist.size(); ++a) {
              acc[a] += dist.probability(a);
            }
            if (shape.size() == 0) shape = dist;
          },
          eopt);
      merge_diag(d);
      if (options.verbose) {
        std::clog << "[qkr] realization " << r + 1 << "/" << cfg.realizations
                  << " done\n";
      }
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      MomentumDist dist = shape;
      for (std::size_t a = 0; a < dist.size(); ++a) {
        dist.density[a] =
            psum[i][a] / (static_cast<double>(cfg.realizations) * dist.dk);
      }
      rows[i].energy_er = kinetic_energy(dist);
      const CorrFunction g1 = g1_from_momentum(dist, grid);
      fill_row(rows[i], dist, g1, cfg.is_snapshot(rows[i].n_p), ctx);
    }
  } else {
    const FloquetPropagator prop(prep.grid, prep.potential,
                                 prep.scaled.hbar_eff, cfg.kick);
    GreenOptions gopt;
    gopt.skip_density = cfg.obdm_skip_density;
    bool svn_warned = false;
    const EvolveDiagnostics d = evolve(
        prep.levels.orbitals, prop, records,
        [&](const Snapshot& s) {
          SeriesRow& row = rows[row_of.at(s.kick)];
          row.energy_er = kinetic_energy(momentum_dist_fermions(s.orbitals));
          if (!cfg.obdm_enabled || !cfg.is_snapshot(s.kick)) return;
          const auto o0 = Clock::now();
          const SlaterState state = SlaterState::from_orbitals(s.orbitals);
          Obdm rho = compute_obdm(state, gopt);
          for (long i = 0; i < rho.rho.rows(); ++i) {
            const double fermi = state.sites.row(i).squaredNorm();
            m.max_density_mismatch = std::max(
                m.max_density_mismatch, std::abs(rho.rho(i, i).real() - fermi));
          }
          const VonNeumann vn = von_neumann_entropy(rho, cfg.svn_modes);
          row.s_vn_raw = vn.raw;
          row.s_vn_unit_trace = vn.unit_trace;
          m.max_hermiticity = std::max(m.max_hermiticity, rho.checks.hermiticity);
          m.max_trace_defect =
              std::max(m.max_trace_defect, rho.checks.trace_defect);
          m.min_obdm_eigenvalue = std::min(m.min_obdm_eigenvalue, vn.min_eigenvalue);
          m.min_svn_kept_trace = std::min(m.min_svn_kept_trace, vn.kept_trace);
          if (vn.kept_trace < 0.999 * static_cast<double>(cfg.n_particles) &&
              !svn_warned) {
            m.warnings.push_back("S_vN compression kept trace " +
                                 fmt(vn.kept_trace) + " at kick " +
                                 std::to_string(s.kick) +
                                 "; raise obdm.svn_modes or set it to 0");
            svn_warned = true;
          }
          const MomentumDist dist = momentum_dist_obdm(rho);
          const CorrFunction g1 = g1_from_obdm(rho);
          fill_row(row, dist, g1, true, ctx);
          if (cfg.obdm_dump) {
            write_obdm(run_dir + "/obdm_" + std::to_string(s.kick) + ".bin", rho);
          }
          const double secs =
              std::chrono::duration<double>(Clock::now() - o0).count();
          m.obdm_seconds += secs;
          if (options.verbose) {
            std::clog << "[qkr] N_p=" << s.kick << " E=" << row.energy_er
                      << " S_info=" << row.s_info << " S_vN=" << row.s_vn_raw
                      << " (" << secs << " s)\n";
          }
        },
        eopt);
    merge_diag(d);
  }
  if (m.evolve.boundary_warning) {
    m.warnings.push_back("boundary occupancy " +
                         fmt(m.evolve.max_boundary_occupancy) +
                         " exceeded the monitor limit at kick " +
                         std::to_string(m.evolve.worst_boundary_kick));
  }

  std::vector<long> kicks;
  std::vector<double> energies;
  for (const SeriesRow& r : rows) {
    kicks.push_back(r.n_p);
    energies.push_back(r.energy_er);
  }
  try {
    m.localized = localized_window_mean(kicks, energies, cfg.window_lo,
                                        cfg.window_hi);
    m.localized_valid = true;
  } catch (const ConfigError&) {
    // Run shorter than the analysis window.
  }

  write_series(run_dir + "/series.csv", rows);
  m.series = std::move(rows);
  m.finished = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
  m.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(run_dir, config, cfg, m);
  return m;
}

RunManifest run_experiment(const Config& config, const RunOptions& options) {
  const ExperimentConfig cfg = config.resolve();
  return run_experiment_in(config, make_run_dir(cfg.output_dir, cfg.name),
                           options);
}

std::string sweep_key(const std::string& axis) {
  if (axis == "n_dim" || axis == "grid.n_dim") return "grid.n_dim";
  if (axis == "N" || axis == "gas.n_particles") return "gas.n_particles";
  if (axis == "trap.kind") return "trap.kind";
  if (axis == "kick.K" || axis == "K") return "kick.K";
  throw ConfigError("cannot sweep over '" + axis +
                    "' (n_dim, N, trap.kind, kick.K)");
}

std::vector<SweepEntry> sweep(const Config& config, const std::string& axis,
                              const std::vector<std::string>& values,
                              const std::string& root,
                              const RunOptions& options) {
  const std::string key = sweep_key(axis);
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  fs::create_directories(root);
  std::vector<SweepEntry> out;
  for (const std::string& v : values) {
    SweepEntry e;
    e.value = v;
    try {
      Config c = config;
      c.set(key, v);
      e.manifest = run_experiment_in(c, root + "/" + key + "-" + v, options);
      e.ok = true;
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  std::ofstream s(root + "/summary.csv");
  s << "value,ok,localized_energy_er,localized_drift,error\n";
  for (const SweepEntry& e : out) {
    const bool loc = e.ok && e.manifest.localized_valid;
    std::string err = e.error;
    std::replace(err.begin(), err.end(), ',', ';');
    s << e.value << ',' << (e.ok ? "true" : "false") << ','
      << fmt(loc ? e.manifest.localized.mean : kNaN) << ','
      << fmt(loc ? e.manifest.localized.drift : kNaN) << ',' << err << '\n';
  }
  return out;
}

void write_two_columns(const std::string& path, const std::string& header,
                       const std::vector<double>& x,
                       const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << header << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << fmt(x[i]) << ',' << fmt(y[i]) << '\n';
  }
}

void read_two_columns(const std::string& path, std::vector<double>& x,
                      std::vector<double>& y) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  std::getline(in, line);  // header
  x.clear();
  y.clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed row in " + path);
    try {
      x.push_back(std::stod(line.substr(0, comma)));
      y.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("malformed number in " + path);
    }
  }
}

MomentumDist read_momentum_csv(const std::string& path) {
  MomentumDist d;
  read_two_columns(path, d.k_values, d.density);
  if (d.k_values.size() < 2) throw ConfigError(path + " holds too few bins");
  d.dk = d.k_values[1] - d.k_values[0];
  return d;
}

CorrFunction read_g1_csv(const std::string& path) {
  CorrFunction c;
  read_two_columns(path, c.z_values, c.g1);
  return c;
}

std::vector<SeriesRow> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<SeriesRow> rows;
  auto num = [](const std::string& s) {
    return s == "nan" || s.empty() ? kNaN : std::stod(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() == 10) f.emplace_back();
    if (f.size() != 11) throw ConfigError("malformed series row in " + path);
    SeriesRow r;
    r.n_p = std::stol(f[0]);
    r.energy_er = num(f[1]);
    r.s_info = num(f[2]);
    r.s_vn_raw = num(f[3]);
    r.s_vn_unit_trace = num(f[4]);
    r.jsd_prev = num(f[5]);
    r.contact = num(f[6]);
    r.contact_cv = num(f[7]);
    r.fit_model = f[8];
    r.fit_param = num(f[9]);
    r.fit_residual = num(f[10]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace qkr
