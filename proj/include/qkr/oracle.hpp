#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qkr/grid.hpp"
#include "qkr/tonks.hpp"

namespace qkr::oracle {

// Brute-force references used by the tests and the `oracle` subcommand.
// Nothing here calls into the production propagator or tonks paths.

// |J_n(x)|^2 for n = -n_max .. n_max (index n + n_max), by Miller's
// backward recurrence normalized with J_0 + 2 sum J_2k = 1.
std::vector<double> bessel_one_kick(double x, int n_max);

// Bosonic OBDM of two hard-core bosons from the symmetrized two-body
// wavefunction Psi_B = sgn(x - y) Psi_F on all site pairs:
//   rho(x, x') = 2 sum_y Psi_B(x, y) Psi_B*(x', y) dz,
// returned site-normalized (times dz). Requires orthonormal orbitals and
// n_dim <= 128.
Obdm brute_obdm_n2(const Orbital& a, const Orbital& b);

// G_ij = <b_i b_j^dag> by explicit Fock-space enumeration of the Slater
// state, with the Jordan-Wigner string and fermionic signs applied bit by
// bit. Limited to n_dim <= 64 and C(n_dim, N + 1) <= 2e6.
Eigen::MatrixXcd fock_green_function(const Eigen::MatrixXcd& sites);

// Random orthonormal orbitals (QR of a Gaussian matrix), site-normalized
// columns turned into position-space orbitals on `grid`.
std::vector<Orbital> random_orbitals(GridPtr grid, std::size_t n,
                                     unsigned long long seed);

}  // namespace qkr::oracle
