#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qkr/config.hpp"
#include "qkr/floquet.hpp"
#include "qkr/observables.hpp"
#include "qkr/trap.hpp"

namespace qkr {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One row of series.csv. Columns that do not apply to a row are NaN.
struct SeriesRow {
  long n_p = 0;
  double energy_er = kNaN;  // per particle
  double s_info = kNaN;
  double s_vn_raw = kNaN;
  double s_vn_unit_trace = kNaN;
  double jsd_prev = kNaN;   // J(n(N_p), n(N_p - lag))
  double contact = kNaN;
  double contact_cv = kNaN;
  std::string fit_model;
  double fit_param = kNaN;
  double fit_residual = kNaN;
};

struct FileEntry {
  std::string name;  // relative to the run directory
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string out_dir;
  std::string config_hash;
  std::string code_version;
  std::string started;
  std::string finished;
  double wall_seconds = 0.0;

  std::vector<SeriesRow> series;
  std::vector<FileEntry> files;

  EvolveDiagnostics evolve;
  double eigen_residual = 0.0;
  double eigen_overlap = 0.0;
  std::vector<double> level_energies;  // E_r
  double max_hermiticity = 0.0;
  double max_trace_defect = 0.0;
  double min_obdm_eigenvalue = 0.0;
  double min_svn_kept_trace = 0.0;
  double max_density_mismatch = 0.0;  // |rho_ii - fermion density|
  double obdm_seconds = 0.0;
  std::vector<std::string> warnings;

  WindowStats localized;  // energy over the analysis window
  bool localized_valid = false;
};

// Version string compiled into the binary.
std::string code_version();

struct RunOptions {
  bool verbose = false;  // progress lines on stderr
};

// Runs one experiment into `run_dir` (created if needed) and writes
// series.csv, nk_<np>.csv, g1_<np>.csv, optional obdm_<np>.bin and
// manifest.txt.
RunManifest run_experiment_in(const Config& config, const std::string& run_dir,
                              const RunOptions& options = {});

// Same, into <output.dir>/<name>/<timestamp>/.
RunManifest run_experiment(const Config& config,
                           const RunOptions& options = {});

// Timestamped run directory that does not exist yet.
std::string make_run_dir(const std::string& root, const std::string& name);

// Canonical sweep axis for a user-facing name (n_dim, N, trap.kind,
// kick.K or full keys); throws ConfigError for anything else.
std::string sweep_key(const std::string& axis);

struct SweepEntry {
  std::string value;
  bool ok = false;
  std::string error;
  RunManifest manifest;
};

// One run per value under a shared root with summary.csv holding the
// localized energy per value. Failed runs are recorded and skipped.
std::vector<SweepEntry> sweep(const Config& config, const std::string& axis,
                              const std::vector<std::string>& values,
                              const std::string& root,
                              const RunOptions& options = {});

// Two-column CSV readers/writers used for nk and g1 files.
void write_two_columns(const std::string& path, const std::string& header,
                       const std::vector<double>& x,
                       const std::vector<double>& y);
void read_two_columns(const std::string& path, std::vector<double>& x,
                      std::vector<double>& y);
MomentumDist read_momentum_csv(const std::string& path);
CorrFunction read_g1_csv(const std::string& path);
std::vector<SeriesRow> read_series_csv(const std::string& path);

// Grid, potential and lowest orbitals for a resolved config.
struct Prepared {
  GridPtr grid;
  ScaledParams scaled;
  Eigen::VectorXd potential;
  EigenSet levels;
};
Prepared prepare(const ExperimentConfig& cfg);

}  // namespace qkr
