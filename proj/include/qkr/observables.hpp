#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qkr/grid.hpp"
#include "qkr/tonks.hpp"

namespace qkr {

// Momentum distribution on the grid's momentum bins in ascending order,
// k_values[a] = (a - n/2) dk with k in units of k_L. `density` is n(k) per
// unit k / k_L; probabilities are density * dk and sum to one.
struct MomentumDist {
  std::vector<double> k_values;
  std::vector<double> density;
  double dk = 0.0;

  std::size_t size() const { return density.size(); }
  double probability(std::size_t a) const { return density[a] * dk; }
  double total() const;
};

// |phi(k)|^2 of one orbital.
MomentumDist momentum_dist_single(const Orbital& orb);
// Fermionic distribution (1/N) sum_n |phi_n(k)|^2; also the gamma = 0
// distribution when N = 1.
MomentumDist momentum_dist_fermions(const std::vector<Orbital>& orbitals);
// Bosonic distribution n(k) = sum_ij e^{-ik(zeta_i - zeta_j)} rho_ij / N.
// Throws InvariantError if any bin is below -tol before normalization.
MomentumDist momentum_dist_obdm(const Obdm& rho, double tol = 1e-10);

// <(k / k_L)^2>, i.e. the kinetic energy per particle in E_r.
double kinetic_energy(const MomentumDist& dist);
// <psi| (2 q)^2 |psi> evaluated by applying the spectral operator in
// position space; equals kinetic_energy(momentum_dist_single(orb)).
double kinetic_energy_operator(const Orbital& orb);

// -sum p log p over bin probabilities, natural log.
double info_entropy(const MomentumDist& dist);
// Jensen-Shannon divergence with log2, in [0, 1]. Throws ConfigError when
// the two distributions live on different bins.
double jsd(const MomentumDist& p, const MomentumDist& q);
double jsd(const std::vector<double>& p, const std::vector<double>& q);

// Distance-averaged one-body correlation, z in lattice spacings, g1(0) = 1.
struct CorrFunction {
  std::vector<double> z_values;
  std::vector<double> g1;
};

// Re sum_k p(k) e^{ik zeta} for zeta = 0 .. Z/2.
CorrFunction g1_from_momentum(const MomentumDist& dist, const Grid& grid);
// (1/N) Re sum_i rho(zeta_i + zeta, zeta_i) on the periodic grid.
CorrFunction g1_from_obdm(const Obdm& rho);

enum class DecayModel { kExponential, kLorentzian, kAlgebraic };
DecayModel parse_decay_model(const std::string& name);
std::string to_string(DecayModel model);

// A exp(-z / r_c), A / (1 + (z / w)^2) or A / sqrt(z). `param` is r_c, w,
// or A for the algebraic model (whose amplitude is its only parameter).
struct FitResult {
  DecayModel model = DecayModel::kExponential;
  double amplitude = 0.0;
  double param = 0.0;
  double residual_rms = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  std::size_t points = 0;
};

// Least squares over z in [z_min, z_max]. Throws ConfigError for a window
// with fewer than three samples and ConvergenceError when the optimizer
// stops without converging.
FitResult fit_decay(const CorrFunction& corr, DecayModel model, double z_min,
                    double z_max);

struct ContactPlateau {
  double contact = 0.0;  // mean of k^4 n(k)
  double cv = 0.0;       // std / mean
  std::size_t bins = 0;
};

// k^4 n(k) over k_min <= |k| <= k_max. Throws ConfigError when fewer than
// four bins qualify.
ContactPlateau contact_plateau(const MomentumDist& dist, double k_min = 6.0,
                               double k_max = 1e300);

// Convolution with a normalized Gaussian of standard deviation `sigma_k`
// (units of k_L) on the same bins, mimicking finite time of flight.
MomentumDist tof_blur(const MomentumDist& dist, double sigma_k);

struct WindowStats {
  double mean = 0.0;
  double drift = 0.0;  // (mean of second half - mean of first half) / mean
  std::size_t points = 0;
};

// Mean of `values` for kicks in [lo, hi], and the relative change between
// the halves [lo, mid) and [mid, hi]. Throws ConfigError for fewer than
// four points.
WindowStats localized_window_mean(const std::vector<long>& kicks,
                                  const std::vector<double>& values, long lo,
                                  long hi);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qkr
