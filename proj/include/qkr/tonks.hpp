#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkr/grid.hpp"

namespace qkr {

// N fermionic orbitals as the columns of an n_dim x N matrix, stored with
// site normalization P_{j n} = psi_n(zeta_j) sqrt(dz) so that P^dag P = 1.
struct SlaterState {
  GridPtr grid;
  Eigen::MatrixXcd sites;

  static SlaterState from_orbitals(const std::vector<Orbital>& orbitals);

  std::size_t n_particles() const {
    return static_cast<std::size_t>(sites.cols());
  }
  std::size_t n_sites() const { return static_cast<std::size_t>(sites.rows()); }
  // max |P^dag P - 1|.
  double orthonormality_defect() const;
};

// G_ij = <b_i b_j^dag> of the hard-core bosons from the Jordan-Wigner
// string expectation: det[(P^(i))^dag P^(j)], where P^(i) is P with rows
// 0 .. i-1 negated and the unit column e_i appended. One (N+1) x (N+1)
// determinant per pair. Slow; kept as the oracle for the fast path.
Eigen::MatrixXcd green_function_reference(const SlaterState& state);

struct GreenOptions {
  // Rows whose density |P_i|^2 falls below this are left at zero; by
  // Cauchy-Schwarz |rho_ij| <= sqrt(rho_ii rho_jj).
  double skip_density = 0.0;
  // Sherman-Morrison updates continue while a running bound on ||A^-1||_F
  // stays below this; past it A is refactorized at every step until it
  // is well conditioned again.
  double cond_cap = 1e4;
  // Rebuild A^-1 from prefix sums every this many updates.
  int refresh_interval = 128;
};

struct GreenStats {
  std::size_t updates = 0;
  std::size_t refreshes = 0;
  std::size_t direct = 0;
  std::size_t skipped_rows = 0;
};

// Same matrix in O(n_dim^2 N^2). For i < j,
//   G_ij = det(A) P_i A^-1 P_j^dag,  A = 1 - 2 sum_{s=i}^{j-1} P_s^dag P_s,
// and A^-1, det A are carried along j by rank-one updates.
Eigen::MatrixXcd green_function(const SlaterState& state,
                                const GreenOptions& options = {},
                                GreenStats* stats = nullptr);

struct ObdmChecks {
  double hermiticity = 0.0;       // max |rho_ij - conj(rho_ji)|
  double trace_defect = 0.0;      // |tr rho - N|
  double diagonal_excess = 0.0;   // distance of rho_ii outside [0, 1]
  double max_imag_diagonal = 0.0;
  double min_eigenvalue = 0.0;    // only when eigenvalues were computed
  bool positivity_checked = false;
};

struct ObdmTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double positivity = 1e-8;
  double diagonal = 1e-10;
};

// Site-normalized one-particle density matrix rho_ij = <b_j^dag b_i>, i.e.
// rho(zeta_i, zeta_j) dz. Diagonal equals the fermionic density times dz.
struct Obdm {
  GridPtr grid;
  Eigen::MatrixXcd rho;
  std::size_t n_particles = 0;
  ObdmChecks checks;
};

// rho = G + diag(1 - 2 G_ii), checked against the tolerances; throws
// InvariantError with the measured defect.
Obdm obdm_from_green(Eigen::MatrixXcd green, GridPtr grid,
                     std::size_t n_particles,
                     const ObdmTolerances& tol = {});

// Convenience: fast Green's function followed by obdm_from_green.
Obdm compute_obdm(const SlaterState& state, const GreenOptions& options = {},
                  const ObdmTolerances& tol = {}, GreenStats* stats = nullptr);

// Eigenvalues of a Hermitian matrix, ascending (LAPACK zheevd).
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);

struct VonNeumann {
  double raw = 0.0;         // -sum lambda log lambda, tr rho = N
  double unit_trace = 0.0;  // same for rho / N
  double min_eigenvalue = 0.0;
  double kept_trace = 0.0;  // trace inside the evaluated subspace
  std::size_t dimension = 0;
};

// Entropy from the eigenvalues of rho, clamped at 1e-12. When the grid is
// larger than `max_modes` (0 = no limit) the spectrum is that of rho
// compressed onto the `max_modes` most occupied plane waves; `kept_trace`
// reports how much of N that subspace holds. The dropped eigenvalue tail
// can carry a large share of the entropy, so only use compression when
// kept_trace is close to N. Throws InvariantError when an
// eigenvalue is below -tol.positivity and records it in rho.checks.
VonNeumann von_neumann_entropy(Obdm& rho, std::size_t max_modes = 0,
                               const ObdmTolerances& tol = {});

// -sum lambda log lambda over an explicit spectrum, with clamping.
double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues,
                           double clamp = 1e-12);

// Binary dump: "OBDM", u32 version, u32 n_dim, u32 N, then rho row-major as
// little-endian (re, im) f64 pairs.
void write_obdm(const std::string& path, const Obdm& rho);
// Reads a dump back; the grid of the result is `grid` (checked by size).
Obdm read_obdm(const std::string& path, GridPtr grid);

}  // namespace qkr
