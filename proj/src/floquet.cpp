#include "qkr/floquet.hpp"

#include <algorithm>
#include <cmath>

#include "qkr/error.hpp"

namespace qkr {

namespace {

constexpr cdouble kI{0.0, 1.0};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_boundary(const Orbital& orb, const BoundaryMonitor& monitor,
                    long kick) {
  if (monitor.policy != BoundaryPolicy::kError) return;
  const double occ = boundary_occupancy(orb, monitor.fraction);
  if (occ > monitor.limit) {
    throw BoundaryError("probability reached the box boundary", occ, kick);
  }
}

}  // namespace

KickKind parse_kick_kind(const std::string& name) {
  if (name == "periodic_delta") return KickKind::kPeriodicDelta;
  if (name == "periodic_square") return KickKind::kPeriodicSquare;
  if (name == "random") return KickKind::kRandom;
  throw ConfigError("unknown kick kind '" + name + "'");
}

std::string to_string(KickKind kind) {
  switch (kind) {
    case KickKind::kPeriodicDelta:
      return "periodic_delta";
    case KickKind::kPeriodicSquare:
      return "periodic_square";
    case KickKind::kRandom:
      return "random";
  }
  return "unknown";
}

Splitting parse_splitting(const std::string& name) {
  if (name == "strang") return Splitting::kStrang;
  if (name == "first_order") return Splitting::kFirstOrder;
  throw ConfigError("unknown splitting '" + name + "'");
}

BoundaryPolicy parse_boundary_policy(const std::string& name) {
  if (name == "error") return BoundaryPolicy::kError;
  if (name == "warn") return BoundaryPolicy::kWarn;
  if (name == "off") return BoundaryPolicy::kOff;
  throw ConfigError("unknown boundary policy '" + name + "'");
}

void KickSchedule::validate() const {
  if (n_kicks < 0) throw ConfigError("kick count must be non-negative");
  if (sub_steps < 1) throw ConfigError("need at least one pulse sub-step");
  if (!(jitter >= 0.0 && jitter < 1.0)) {
    throw ConfigError("period jitter must lie in [0, 1)");
  }
  if (kind == KickKind::kPeriodicSquare &&
      !(pulse_fraction >= 0.0 && pulse_fraction < 1.0)) {
    throw ConfigError("pulse fraction must lie in [0, 1)");
  }
}

double random_period(std::uint64_t seed, long kick_index, double jitter) {
  const std::uint64_t bits =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(kick_index)));
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return 1.0 + jitter * (2.0 * u - 1.0);
}

FloquetPropagator::FloquetPropagator(GridPtr grid, Eigen::VectorXd potential,
                                     double hbar_eff, KickSchedule schedule)
    : grid_(std::move(grid)),
      potential_(std::move(potential)),
      hbar_eff_(hbar_eff),
      schedule_(schedule) {
  schedule_.validate();
  const auto n = static_cast<long>(grid_->size());
  if (potential_.size() != n) {
    throw ConfigError("potential does not match grid size");
  }
  if (!(hbar_eff_ > 0.0)) throw ConfigError("hbar_eff must be positive");

  const double kappa = schedule_.K / hbar_eff_;
  kick_.resize(n);
  for (long j = 0; j < n; ++j) {
    kick_[j] = std::exp(-kI * kappa *
                        std::cos(grid_->zeta(static_cast<std::size_t>(j))));
  }
  half_v_ = potential_phase(0.5);
  kin_ = kinetic_phase(1.0);

  if (schedule_.kind == KickKind::kPeriodicSquare) {
    const double f = schedule_.pulse_fraction;
    const double s = static_cast<double>(schedule_.sub_steps);
    Eigen::VectorXcd half_w(n);
    for (long j = 0; j < n; ++j) {
      const double c = std::cos(grid_->zeta(static_cast<std::size_t>(j)));
      half_w[j] = std::exp(-kI * 0.5 * (kappa * c / s +
                                        potential_[j] * f / (s * hbar_eff_)));
    }
    half_v_free_ = potential_phase(0.5 * (1.0 - f));
    kin_pulse_ = kinetic_phase(f / s);
    kin_free_ = kinetic_phase(1.0 - f);
    pulse_first_ = half_w;
    pulse_between_ = half_w.cwiseProduct(half_w);
    pulse_to_free_ = half_w.cwiseProduct(half_v_free_);
  }
}

Eigen::VectorXcd FloquetPropagator::kinetic_phase(double duration) const {
  const auto n = static_cast<long>(grid_->size());
  Eigen::VectorXcd out(n);
  for (long m = 0; m < n; ++m) {
    const double q = grid_->wavenumber(static_cast<std::size_t>(m));
    out[m] = std::exp(-kI * 0.5 * hbar_eff_ * q * q * duration) /
             static_cast<double>(n);
  }
  return out;
}

Eigen::VectorXcd FloquetPropagator::potential_phase(double duration) const {
  const auto n = static_cast<long>(grid_->size());
  Eigen::VectorXcd out(n);
  for (long j = 0; j < n; ++j) {
    out[j] = std::exp(-kI * potential_[j] * duration / hbar_eff_);
  }
  return out;
}

void FloquetPropagator::kinetic(Eigen::VectorXcd& psi,
                                const Eigen::VectorXcd& phase) const {
  grid_->forward(psi.data(), psi.data());
  psi.array() *= phase.array();
  grid_->backward(psi.data(), psi.data());
}

void FloquetPropagator::step(Orbital& orb, long kick_index) const {
  switch (schedule_.kind) {
    case KickKind::kPeriodicDelta:
      step_delta(orb);
      return;
    case KickKind::kPeriodicSquare:
      step_square(orb);
      return;
    case KickKind::kRandom:
      step_random(orb, kick_index);
      return;
  }
}

void FloquetPropagator::step_delta(Orbital& orb) const {
  Eigen::VectorXcd& psi = orb.amplitudes;
  if (schedule_.splitting == Splitting::kFirstOrder) {
    psi.array() *= kick_.array() * half_v_.array().square();
    kinetic(psi, kin_);
    return;
  }
  psi.array() *= kick_.array() * half_v_.array();
  kinetic(psi, kin_);
  psi.array() *= half_v_.array();
}

void FloquetPropagator::step_square(Orbital& orb) const {
  Eigen::VectorXcd& psi = orb.amplitudes;
  psi.array() *= pulse_first_.array();
  for (int s = 0; s < schedule_.sub_steps; ++s) {
    kinetic(psi, kin_pulse_);
    if (s + 1 < schedule_.sub_steps) psi.array() *= pulse_between_.array();
  }
  psi.array() *= pulse_to_free_.array();
  kinetic(psi, kin_free_);
  psi.array() *= half_v_free_.array();
}

void FloquetPropagator::step_random(Orbital& orb, long kick_index) const {
  const double tau = random_period(schedule_.seed, kick_index, schedule_.jitter);
  const Eigen::VectorXcd half = potential_phase(0.5 * tau);
  Eigen::VectorXcd& psi = orb.amplitudes;
  psi.array() *= kick_.array() * half.array();
  kinetic(psi, kinetic_phase(tau));
  psi.array() *= half.array();
}

Orbital step_delta(const Orbital& orb, const FloquetPropagator& prop,
                   const BoundaryMonitor& monitor) {
  Orbital out = orb;
  prop.step_delta(out);
  check_boundary(out, monitor, 0);
  return out;
}

Orbital step_square(const Orbital& orb, const FloquetPropagator& prop,
                    const BoundaryMonitor& monitor) {
  Orbital out = orb;
  prop.step_square(out);
  check_boundary(out, monitor, 0);
  return out;
}

Orbital step_random(const Orbital& orb, const FloquetPropagator& prop,
                    long kick_index, const BoundaryMonitor& monitor) {
  Orbital out = orb;
  prop.step_random(out, kick_index);
  check_boundary(out, monitor, kick_index);
  return out;
}

double orthonormality_defect(const std::vector<Orbital>& orbitals) {
  double worst = 0.0;
  for (std::size_t i = 0; i < orbitals.size(); ++i) {
    for (std::size_t j = i; j < orbitals.size(); ++j) {
      const cdouble o = overlap(orbitals[i], orbitals[j]);
      worst = std::max(worst, std::abs(o - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

EvolveDiagnostics evolve(
    std::vector<Orbital> orbitals, const FloquetPropagator& prop,
    const std::vector<long>& record_at,
    const std::function<void(const Snapshot&)>& on_snapshot,
    const EvolveOptions& options) {
  for (std::size_t i = 1; i < record_at.size(); ++i) {
    if (record_at[i] <= record_at[i - 1]) {
      throw ConfigError("record ladder must be strictly increasing");
    }
  }
  if (!record_at.empty() && record_at.front() < 0) {
    throw ConfigError("record ladder must be non-negative");
  }
  for (const Orbital& o : orbitals) {
    if (o.grid->size() != prop.grid().size()) {
      throw ConfigError("orbital does not live on the propagator grid");
    }
  }

  EvolveDiagnostics diag;
  auto record = [&](long kick) {
    const double defect = orthonormality_defect(orbitals);
    diag.max_orthonormality_defect =
        std::max(diag.max_orthonormality_defect, defect);
    if (defect > options.orthonormality_tol) {
      throw InvariantError("orbitals lost orthonormality at kick " +
                               std::to_string(kick),
                           defect);
    }
    on_snapshot(Snapshot{kick, orbitals});
  };

  const BoundaryMonitor& mon = options.monitor;
  std::size_t next = 0;
  const long last = record_at.empty() ? 0 : record_at.back();
  for (long kick = 0;; ++kick) {
    if (next < record_at.size() && record_at[next] == kick) {
      record(kick);
      ++next;
    }
    if (kick >= last) break;
    for (Orbital& o : orbitals) {
      prop.step(o, kick);
      if (mon.policy == BoundaryPolicy::kOff) continue;
      const double occ = boundary_occupancy(o, mon.fraction);
      if (occ > diag.max_boundary_occupancy) {
        diag.max_boundary_occupancy = occ;
        diag.worst_boundary_kick = kick + 1;
      }
      if (occ > mon.limit) {
        if (mon.policy == BoundaryPolicy::kError) {
          throw BoundaryError("probability reached the box boundary", occ,
                              kick + 1);
        }
        diag.boundary_warning = true;
      }
    }
  }
  return diag;
}

std::vector<Snapshot> evolve(std::vector<Orbital> orbitals,
                             const FloquetPropagator& prop,
                             const std::vector<long>& record_at,
                             const EvolveOptions& options,
                             EvolveDiagnostics* diagnostics) {
  std::vector<Snapshot> out;
  const EvolveDiagnostics d =
      evolve(std::move(orbitals), prop, record_at,
             [&](const Snapshot& s) { out.push_back(s); }, options);
  if (diagnostics != nullptr) *diagnostics = d;
  return out;
}

}  // namespace qkr
