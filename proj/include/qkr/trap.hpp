#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkr/grid.hpp"
#include "qkr/units.hpp"

namespace qkr {

enum class TrapKind { kNone, kFlatBottom, kGaussian };

TrapKind parse_trap_kind(const std::string& name);
std::string to_string(TrapKind kind);

// Longitudinal confinement. Depths in E_r, waists in meters.
//   flat_bottom: V1 (1 - exp(-2 z^2 / w1^2)) + V2 (exp(-2 z^2 / w2^2) - 1)
//   gaussian:    V_G (1 - exp(-2 z^2 / w1^2)), V_G fixed by the small-
//                amplitude trap frequency through V_G = m omega^2 w1^2 / 4.
struct TrapSpec {
  TrapKind kind = TrapKind::kFlatBottom;
  double v1_er = 45.7;
  double v2_er = 9.3;
  double w1 = 300e-6;
  double w2 = 135e-6;
  double harmonic_freq_hz = 14.7;

  void validate() const;
  // Depth of the Gaussian trap in E_r for the given recoil rate E_r / hbar.
  double gaussian_depth_er(double lattice_constant, double recoil_rate) const;
};

TrapSpec flat_bottom_trap(const PhysicalParams& params);

// Scaled potential V_ext(zeta) on every grid point, in the units of the
// dimensionless Hamiltonian p^2/2 + V_ext (one E_r equals hbar_eff^2 / 8).
Eigen::VectorXd potential_on_grid(const TrapSpec& spec, const Grid& grid,
                                  const ScaledParams& scaled);

// Lowest eigenpairs of the one-period generator
//   h = hbar_eff q^2 / 2 + V_ext / hbar_eff
// with the spectral kinetic operator, so exp(-i h) is the free Floquet
// propagator. `phases` are the eigenvalues of h, `energies` the same
// levels in E_r (E / E_r = 8 h / hbar_eff).
struct EigenSet {
  std::vector<double> phases;
  std::vector<double> energies;
  std::vector<Orbital> orbitals;
  double max_residual = 0.0;  // max_i ||h psi_i - phase_i psi_i||
  double max_overlap = 0.0;   // max_{i != j} |<psi_i|psi_j>|
};

struct EigenOptions {
  double residual_tol = 1e-8;
  double overlap_tol = 1e-10;
  std::size_t dense_limit = 1024;  // direct dense solve up to this size
  int max_iterations = 300;
};

EigenSet lowest_eigenstates(const Eigen::VectorXd& potential, GridPtr grid,
                            double hbar_eff, std::size_t n_states,
                            const EigenOptions& options = {});

EigenSet lowest_eigenstates(const TrapSpec& spec, GridPtr grid,
                            const ScaledParams& scaled, std::size_t n_states,
                            const EigenOptions& options = {});

// h psi for a real position-space vector.
Eigen::VectorXd apply_generator(const Eigen::VectorXd& psi,
                                const Eigen::VectorXd& potential,
                                const Grid& grid, double hbar_eff);

}  // namespace qkr
