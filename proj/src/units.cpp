#include "qkr/units.hpp"

#include <cmath>

#include "qkr/error.hpp"

namespace qkr {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string("parameter ") + name +
                      " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(lattice_constant, "lattice_constant");
  require_positive(particle_mass, "particle_mass");
  require_positive(kick_period, "kick_period");
  require_positive(pulse_width, "pulse_width");
  require_positive(trap_depth_er, "trap_depth");
  require_positive(antitrap_depth_er, "antitrap_depth");
  require_positive(trap_waist, "trap_waist");
  require_positive(antitrap_waist, "antitrap_waist");
  if (!(kick_depth_er >= 0.0)) {
    throw ConfigError("kick depth must be non-negative");
  }
  if (pulse_width >= kick_period) {
    throw ConfigError("pulse width must be shorter than the kick period");
  }
}

double PhysicalParams::recoil_rate() const {
  const double pi = std::numbers::pi;
  return pi * pi * kHbar /
         (2.0 * particle_mass * lattice_constant * lattice_constant);
}

PhysicalParams cesium_1064() { return PhysicalParams{}; }

bool physical_preset(const std::string& name, PhysicalParams& out) {
  if (name == "cesium-1064") {
    out = cesium_1064();
    return true;
  }
  return false;
}

ScaledParams derive_scaled(const PhysicalParams& params) {
  params.validate();
  const double omega_r = params.recoil_rate();
  ScaledParams s;
  s.recoil_rate = omega_r;
  s.kick_period = params.kick_period;
  s.hbar_eff = 8.0 * params.kick_period * omega_r;
  // hbar kappa = V_z T_p / 2 with V_z given in E_r.
  s.kappa = params.kick_depth_er * omega_r * params.pulse_width / 2.0;
  s.K = s.hbar_eff * s.kappa;
  s.pulse_fraction = params.pulse_width / params.kick_period;
  return s;
}

double energy_to_recoils(double p2_mean, double hbar_eff) {
  const double scale = 2.0 / hbar_eff;
  return scale * scale * 2.0 * p2_mean;
}

}  // namespace qkr
