#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkr/grid.hpp"

namespace qkr {

enum class KickKind { kPeriodicDelta, kPeriodicSquare, kRandom };
enum class Splitting { kStrang, kFirstOrder };

KickKind parse_kick_kind(const std::string& name);
std::string to_string(KickKind kind);
Splitting parse_splitting(const std::string& name);

struct KickSchedule {
  KickKind kind = KickKind::kPeriodicSquare;
  long n_kicks = 0;
  double K = 0.0;
  double pulse_fraction = 0.0;  // T_p / T, square pulses only
  int sub_steps = 8;            // Strang sub-steps inside a square pulse
  std::uint64_t seed = 0;       // random kind only
  double jitter = 0.0;          // relative period jitter, random kind only
  Splitting splitting = Splitting::kStrang;

  void validate() const;
};

enum class BoundaryPolicy { kError, kWarn, kOff };
BoundaryPolicy parse_boundary_policy(const std::string& name);

// Probability in the outer `fraction` of the box must stay below `limit`.
struct BoundaryMonitor {
  double fraction = 0.05;
  double limit = 1e-6;
  BoundaryPolicy policy = BoundaryPolicy::kError;
};

// Free-evolution duration (in periods) of kick `kick_index` for a random
// schedule: uniform in [1 - jitter, 1 + jitter], a pure function of
// (seed, kick_index).
double random_period(std::uint64_t seed, long kick_index, double jitter);

// One-period Floquet maps for a fixed grid, potential and schedule. Every
// phase array is precomputed, so a step costs two transforms per split
// segment. Immutable and shareable; each Orbital is single-writer.
class FloquetPropagator {
 public:
  FloquetPropagator(GridPtr grid, Eigen::VectorXd potential, double hbar_eff,
                    KickSchedule schedule);

  // Dispatches on the schedule kind. `kick_index` counts from 0.
  void step(Orbital& orb, long kick_index) const;

  // exp(-i (hbar q^2/2 + V/hbar)) exp(-i (K/hbar) cos zeta)
  void step_delta(Orbital& orb) const;
  // Free segment of length 1 - T_p/T after a pulse segment of length T_p/T
  // in which the full kick acts together with the kinetic and trap terms.
  void step_square(Orbital& orb) const;
  // Delta kick followed by free evolution for random_period(seed, kick).
  void step_random(Orbital& orb, long kick_index) const;

  const Grid& grid() const { return *grid_; }
  const KickSchedule& schedule() const { return schedule_; }
  double hbar_eff() const { return hbar_eff_; }
  const Eigen::VectorXd& potential() const { return potential_; }

 private:
  void kinetic(Eigen::VectorXcd& psi, const Eigen::VectorXcd& phase) const;
  Eigen::VectorXcd kinetic_phase(double duration) const;
  Eigen::VectorXcd potential_phase(double duration) const;

  GridPtr grid_;
  Eigen::VectorXd potential_;
  double hbar_eff_;
  KickSchedule schedule_;

  Eigen::VectorXcd kick_;        // exp(-i kappa cos zeta)
  Eigen::VectorXcd half_v_;      // exp(-i V / (2 hbar))
  Eigen::VectorXcd kin_;         // exp(-i hbar q^2 / 2) / n
  // Square pulse pieces.
  Eigen::VectorXcd pulse_first_, pulse_between_, pulse_to_free_;
  Eigen::VectorXcd half_v_free_, kin_pulse_, kin_free_;
};

// Free-function forms. A boundary-monitor violation raises BoundaryError
// (policy kError) after the step.
Orbital step_delta(const Orbital& orb, const FloquetPropagator& prop,
                   const BoundaryMonitor& monitor = {});
Orbital step_square(const Orbital& orb, const FloquetPropagator& prop,
                    const BoundaryMonitor& monitor = {});
Orbital step_random(const Orbital& orb, const FloquetPropagator& prop,
                    long kick_index, const BoundaryMonitor& monitor = {});

struct Snapshot {
  long kick = 0;
  std::vector<Orbital> orbitals;
};

struct EvolveDiagnostics {
  double max_boundary_occupancy = 0.0;
  long worst_boundary_kick = -1;
  double max_orthonormality_defect = 0.0;
  bool boundary_warning = false;
};

// max_{ij} |<psi_i|psi_j> - delta_ij|
double orthonormality_defect(const std::vector<Orbital>& orbitals);

struct EvolveOptions {
  BoundaryMonitor monitor;
  double orthonormality_tol = 1e-8;
};

// Evolves all orbitals through the schedule and calls `on_snapshot` at each
// kick count in `record_at` (strictly increasing; 0 is the input state).
EvolveDiagnostics evolve(
    std::vector<Orbital> orbitals, const FloquetPropagator& prop,
    const std::vector<long>& record_at,
    const std::function<void(const Snapshot&)>& on_snapshot,
    const EvolveOptions& options = {});

// Convenience overload that collects the snapshots.
std::vector<Snapshot> evolve(std::vector<Orbital> orbitals,
                             const FloquetPropagator& prop,
                             const std::vector<long>& record_at,
                             const EvolveOptions& options = {},
                             EvolveDiagnostics* diagnostics = nullptr);

}  // namespace qkr
