#pragma once

#include <numbers>
#include <string>

namespace qkr {

inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kAtomicMass = 1.66053906660e-27;  // kg
inline constexpr double kCesiumMass = 132.905451961 * kAtomicMass;

// Laboratory parameters of one kicked tube. Energies are in recoil units
// E_r = pi^2 hbar^2 / (2 m a^2); everything else is SI.
struct PhysicalParams {
  double lattice_constant = 532.25e-9;  // a, m
  double particle_mass = kCesiumMass;   // m, kg
  double kick_period = 60e-6;           // T, s
  double pulse_width = 10e-6;           // T_p, s
  double kick_depth_er = 20.0;          // V_z
  double trap_depth_er = 45.7;          // V1
  double antitrap_depth_er = 9.3;       // V2
  double trap_waist = 300e-6;           // w1, m
  double antitrap_waist = 135e-6;       // w2, m

  // Throws ConfigError when a field is non-positive or T_p >= T.
  void validate() const;

  // k_L = pi / a.
  double lattice_wavenumber() const {
    return std::numbers::pi / lattice_constant;
  }
  // E_r / hbar in 1/s.
  double recoil_rate() const;
};

// Cs-133 in a 1064 nm lattice (a = 532.25 nm), T = 60 us, T_p = 10 us,
// V_z = 20 E_r, flat-bottom trap V1 = 45.7 E_r, V2 = 9.3 E_r.
PhysicalParams cesium_1064();

// Returns true and fills `out` if `name` is a known species preset.
bool physical_preset(const std::string& name, PhysicalParams& out);

// Dimensionless Floquet constants. Time is measured in kick periods,
// position as zeta = 2 k_L z, and p = hbar_eff corresponds to P = 2 hbar k_L.
struct ScaledParams {
  double hbar_eff = 0.0;
  double K = 0.0;
  double kappa = 0.0;           // K / hbar_eff
  double pulse_fraction = 0.0;  // T_p / T
  double recoil_rate = 0.0;     // E_r / hbar, 1/s
  double kick_period = 0.0;     // T, s (kept for time conversions)

  // Scaled-Hamiltonian value of one recoil energy: hbar_eff^2 / 8.
  double recoil_in_scaled() const { return hbar_eff * hbar_eff / 8.0; }
};

ScaledParams derive_scaled(const PhysicalParams& params);

// Converts <p^2>/2 in scaled units to a kinetic energy in E_r:
// <(P / hbar k_L)^2> = (2 / hbar_eff)^2 <p^2>.
double energy_to_recoils(double p2_mean, double hbar_eff);

}  // namespace qkr
