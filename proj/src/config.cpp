#include "qkr/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkr/error.hpp"

#ifndef QKR_PRESET_DIR
#define QKR_PRESET_DIR "presets"
#endif

namespace qkr {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<long>(d);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an unsigned integer, got '" + v +
                      "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const long n = parse_long(key, v);
  if (n < 0) throw ConfigError("'" + key + "' must be non-negative");
  return static_cast<std::size_t>(n);
}

}  // namespace

GasModel parse_gas_model(const std::string& name) {
  if (name == "gamma0") return GasModel::kGamma0;
  if (name == "tonks") return GasModel::kTonks;
  throw ConfigError("unknown gas model '" + name + "' (gamma0 or tonks)");
}

std::string to_string(GasModel model) {
  return model == GasModel::kGamma0 ? "gamma0" : "tonks";
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "name",
      "desk_scale",
      "species",
      "physical.lattice_constant",
      "physical.mass",
      "physical.kick_period",
      "physical.pulse_width",
      "physical.kick_depth_er",
      "trap.kind",
      "trap.v1_er",
      "trap.v2_er",
      "trap.w1",
      "trap.w2",
      "trap.harmonic_freq_hz",
      "grid.n_dim",
      "grid.length",
      "grid.snap_to_lattice",
      "gas.model",
      "gas.n_particles",
      "kick.kind",
      "kick.n_kicks",
      "kick.K",
      "kick.sub_steps",
      "kick.splitting",
      "kick.seed",
      "kick.jitter",
      "kick.realizations",
      "record.series_step",
      "record.snapshot_start",
      "record.snapshot_step",
      "observables.jsd_lag",
      "observables.contact_k_min",
      "observables.contact_k_max",
      "observables.fit_model",
      "observables.fit_z_min",
      "observables.fit_z_max",
      "observables.tof_sigma_k",
      "obdm.enabled",
      "obdm.svn_modes",
      "obdm.dump",
      "obdm.skip_density",
      "monitor.boundary_policy",
      "monitor.boundary_limit",
      "monitor.boundary_fraction",
      "monitor.orthonormality_tol",
      "analysis.window_lo",
      "analysis.window_hi",
      "output.dir",
  };
  return keys;
}

ScaledParams ExperimentConfig::scaled() const {
  return derive_scaled(physical);
}

double ExperimentConfig::box_length() const {
  return snap_to_lattice ? qkr::snap_to_lattice(length_z,
                                                physical.lattice_constant)
                         : length_z;
}

std::vector<long> ExperimentConfig::record_kicks() const {
  std::vector<long> out;
  for (long k = 0; k <= kick.n_kicks; k += series_step) out.push_back(k);
  for (long k : snapshot_kicks()) out.push_back(k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<long> ExperimentConfig::snapshot_kicks() const {
  std::vector<long> out = {0};
  for (long k = snapshot_start; k <= kick.n_kicks; k += snapshot_step) {
    if (k > 0) out.push_back(k);
  }
  return out;
}

bool ExperimentConfig::is_snapshot(long k) const {
  if (k == 0) return true;
  return k >= snapshot_start && k <= kick.n_kicks &&
         (k - snapshot_start) % snapshot_step == 0;
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config c;
  c.merge_text(text, origin, 0);
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

std::vector<std::string> Config::preset_dirs() {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("QKR_PRESET_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(QKR_PRESET_DIR);
  dirs.emplace_back("presets");
  return dirs;
}

std::vector<std::string> Config::list_presets() {
  std::vector<std::string> names;
  for (const std::string& d : preset_dirs()) {
    std::error_code ec;
    if (!fs::is_directory(d, ec)) continue;
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.path().extension() == ".conf") {
        names.push_back(e.path().stem().string());
      }
    }
    break;
  }
  std::sort(names.begin(), names.end());
  return names;
}

Config Config::from_preset(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    throw ConfigError("preset names may not contain '/': " + name);
  }
  for (const std::string& d : preset_dirs()) {
    const fs::path p = fs::path(d) / (name + ".conf");
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) {
      Config c = from_file(p.string());
      if (!c.has("name")) c.set("name", name);
      return c;
    }
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void Config::merge_text(const std::string& text, const std::string& origin,
                        int depth) {
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) merge_line(line, origin, ++no, depth);
}

void Config::merge_line(const std::string& raw, const std::string& origin,
                        int line_no, int depth) {
  std::string line = raw;
  const auto hash_pos = line.find('#');
  if (hash_pos != std::string::npos) line.erase(hash_pos);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(origin + ":" + std::to_string(line_no) +
                      ": expected 'key = value'");
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) {
    throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
  }
  if (key == "base") {
    if (depth > 8) throw ConfigError("preset base chain too deep");
    for (const std::string& d : preset_dirs()) {
      const fs::path p = fs::path(d) / (value + ".conf");
      std::error_code ec;
      if (!fs::is_regular_file(p, ec)) continue;
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      merge_text(ss.str(), p.string(), depth + 1);
      return;
    }
    throw ConfigError(origin + ": unknown base preset '" + value + "'");
  }
  set(key, value);
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& known = known_config_keys();
  if (std::find(known.begin(), known.end(), key) == known.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  entries_[key] = value;
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::string Config::get(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? std::string() : it->second;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig Config::resolve() const {
  ExperimentConfig c;
  auto str = [&](const std::string& k, const std::string& def) {
    return has(k) ? get(k) : def;
  };
  auto num = [&](const std::string& k, double def) {
    return has(k) ? parse_double(k, get(k)) : def;
  };
  auto lng = [&](const std::string& k, long def) {
    return has(k) ? parse_long(k, get(k)) : def;
  };
  auto cnt = [&](const std::string& k, std::size_t def) {
    return has(k) ? parse_count(k, get(k)) : def;
  };
  auto flag = [&](const std::string& k, bool def) {
    return has(k) ? parse_bool(k, get(k)) : def;
  };

  c.name = str("name", "custom");
  c.desk_scale = flag("desk_scale", true);

  const std::string species = str("species", "cesium-1064");
  if (!physical_preset(species, c.physical)) {
    throw ConfigError("unknown species preset '" + species + "'");
  }
  PhysicalParams& p = c.physical;
  p.lattice_constant = num("physical.lattice_constant", p.lattice_constant);
  p.particle_mass = num("physical.mass", p.particle_mass);
  p.kick_period = num("physical.kick_period", p.kick_period);
  p.pulse_width = num("physical.pulse_width", p.pulse_width);
  p.kick_depth_er = num("physical.kick_depth_er", p.kick_depth_er);
  p.trap_depth_er = num("trap.v1_er", p.trap_depth_er);
  p.antitrap_depth_er = num("trap.v2_er", p.antitrap_depth_er);
  p.trap_waist = num("trap.w1", p.trap_waist);
  p.antitrap_waist = num("trap.w2", p.antitrap_waist);
  p.validate();

  c.trap = flat_bottom_trap(p);
  c.trap.kind = parse_trap_kind(str("trap.kind", "flat_bottom"));
  c.trap.harmonic_freq_hz = num("trap.harmonic_freq_hz", 14.7);
  c.trap.validate();

  c.n_dim = cnt("grid.n_dim", c.n_dim);
  c.length_z = num("grid.length", c.length_z);
  c.snap_to_lattice = flag("grid.snap_to_lattice", true);
  if (c.n_dim < 8) throw ConfigError("grid.n_dim must be at least 8");
  if (!(c.length_z > 0.0)) throw ConfigError("grid.length must be positive");

  c.model = parse_gas_model(str("gas.model", "gamma0"));
  c.n_particles = cnt("gas.n_particles", c.model == GasModel::kTonks ? 18 : 1);
  if (c.n_particles < 1) throw ConfigError("gas.n_particles must be >= 1");
  if (c.n_particles >= c.n_dim) {
    throw ConfigError("more particles than grid points");
  }

  const ScaledParams s = derive_scaled(p);
  KickSchedule& k = c.kick;
  k.kind = parse_kick_kind(str("kick.kind", "periodic_square"));
  k.n_kicks = lng("kick.n_kicks", 800);
  c.kick_k_derived = !has("kick.K") || get("kick.K") == "derived";
  k.K = c.kick_k_derived ? s.K : num("kick.K", s.K);
  k.pulse_fraction = s.pulse_fraction;
  k.sub_steps = static_cast<int>(lng("kick.sub_steps", 8));
  k.splitting = parse_splitting(str("kick.splitting", "strang"));
  k.seed = has("kick.seed") ? parse_u64("kick.seed", get("kick.seed")) : 1;
  k.jitter = num("kick.jitter", k.kind == KickKind::kRandom ? 0.5 : 0.0);
  k.validate();
  c.realizations = static_cast<int>(lng("kick.realizations", 1));
  if (c.realizations < 1) throw ConfigError("kick.realizations must be >= 1");
  if (c.realizations > 1 && k.kind != KickKind::kRandom) {
    throw ConfigError("several realizations only make sense for random kicks");
  }

  c.series_step = lng("record.series_step", 10);
  c.snapshot_start = lng("record.snapshot_start", 1);
  c.snapshot_step = lng("record.snapshot_step", 50);
  if (c.series_step < 1 || c.snapshot_step < 1 || c.snapshot_start < 0) {
    throw ConfigError("record steps must be positive");
  }

  c.jsd_lag = lng("observables.jsd_lag", 100);
  c.contact_k_min = num("observables.contact_k_min", 6.0);
  c.contact_k_max = num("observables.contact_k_max", 1e300);
  c.fit_model = parse_decay_model(str("observables.fit_model", "exponential"));
  c.fit_z_min = num("observables.fit_z_min", 0.25);
  c.fit_z_max = num("observables.fit_z_max", 2.5);
  c.tof_sigma_k = num("observables.tof_sigma_k", 0.0);
  if (!(c.fit_z_max > c.fit_z_min) || c.fit_z_min < 0.0) {
    throw ConfigError("fit window must satisfy 0 <= z_min < z_max");
  }

  const std::string obdm = str("obdm.enabled", "auto");
  c.obdm_enabled =
      obdm == "auto" ? c.model == GasModel::kTonks : parse_bool("obdm.enabled", obdm);
  if (c.obdm_enabled && c.model != GasModel::kTonks) {
    throw ConfigError("the OBDM path needs gas.model = tonks");
  }
  if (c.model == GasModel::kTonks && c.realizations > 1) {
    throw ConfigError("realization averaging is limited to gamma0");
  }
  c.svn_modes = cnt("obdm.svn_modes", 0);
  c.obdm_dump = flag("obdm.dump", false);
  c.obdm_skip_density = num("obdm.skip_density", 0.0);

  c.monitor.policy = parse_boundary_policy(str("monitor.boundary_policy", "error"));
  c.monitor.limit = num("monitor.boundary_limit", 1e-6);
  c.monitor.fraction = num("monitor.boundary_fraction", 0.05);
  c.orthonormality_tol = num("monitor.orthonormality_tol", 1e-8);
  if (!(c.monitor.fraction > 0.0 && c.monitor.fraction < 1.0)) {
    throw ConfigError("monitor.boundary_fraction must lie in (0, 1)");
  }

  c.window_lo = lng("analysis.window_lo", 400);
  c.window_hi = lng("analysis.window_hi", 800);
  if (c.window_hi <= c.window_lo) {
    throw ConfigError("analysis window must satisfy lo < hi");
  }
  c.output_dir = str("output.dir", "runs");
  return c;
}

}  // namespace qkr
