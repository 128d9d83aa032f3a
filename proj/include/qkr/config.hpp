#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qkr/floquet.hpp"
#include "qkr/observables.hpp"
#include "qkr/trap.hpp"
#include "qkr/units.hpp"

namespace qkr {

enum class GasModel { kGamma0, kTonks };
GasModel parse_gas_model(const std::string& name);
std::string to_string(GasModel model);

// Fully resolved, validated run description.
struct ExperimentConfig {
  std::string name = "custom";
  bool desk_scale = true;

  PhysicalParams physical;
  TrapSpec trap;

  std::size_t n_dim = 8192;
  double length_z = 300e-6;  // m, before snapping
  bool snap_to_lattice = true;

  GasModel model = GasModel::kGamma0;
  std::size_t n_particles = 1;

  KickSchedule kick;       // K and pulse fraction filled in by resolve()
  bool kick_k_derived = true;
  int realizations = 1;    // random schedules: seeds seed .. seed + r - 1

  long series_step = 10;
  long snapshot_start = 1;
  long snapshot_step = 50;

  long jsd_lag = 100;
  double contact_k_min = 6.0;
  double contact_k_max = 1e300;
  DecayModel fit_model = DecayModel::kExponential;
  double fit_z_min = 0.25;
  double fit_z_max = 2.5;
  double tof_sigma_k = 0.0;

  bool obdm_enabled = false;
  std::size_t svn_modes = 2048;
  bool obdm_dump = false;
  double obdm_skip_density = 0.0;

  BoundaryMonitor monitor;
  double orthonormality_tol = 1e-8;

  long window_lo = 400;
  long window_hi = 800;

  std::string output_dir = "runs";

  ScaledParams scaled() const;
  // Box length actually used (snapped when requested), m.
  double box_length() const;
  // Every kick count that gets a series row, ascending, starting at 0.
  std::vector<long> record_kicks() const;
  // Kick counts with per-snapshot files (and OBDM for the Tonks model).
  std::vector<long> snapshot_kicks() const;
  bool is_snapshot(long kick) const;
};

// Flat key = value configuration with '#' comments and dotted keys. A
// `base = <preset>` line pulls in another preset first.
class Config {
 public:
  static Config from_text(const std::string& text,
                          const std::string& origin = "<text>");
  static Config from_file(const std::string& path);
  static Config from_preset(const std::string& name);

  // Directory searched by from_preset: $QKR_PRESET_DIR, then the source
  // tree's presets/ directory, then ./presets.
  static std::vector<std::string> preset_dirs();
  static std::vector<std::string> list_presets();

  // Overrides one key; "key=value" form accepted by set_assignment.
  void set(const std::string& key, const std::string& value);
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  // Canonical text (sorted keys) and its 64-bit FNV-1a hash in hex; both
  // independent of the order keys were given in.
  std::string canonical() const;
  std::string hash() const;

  // Resolves to a validated ExperimentConfig; throws ConfigError on an
  // unknown key, a malformed value or an invalid combination.
  ExperimentConfig resolve() const;

 private:
  void merge_line(const std::string& line, const std::string& origin,
                  int line_no, int depth);
  void merge_text(const std::string& text, const std::string& origin,
                  int depth);

  std::map<std::string, std::string> entries_;
};

// Keys accepted in configuration files.
const std::vector<std::string>& known_config_keys();

}  // namespace qkr
