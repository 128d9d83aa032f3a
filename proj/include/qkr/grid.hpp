#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace qkr {

using cdouble = std::complex<double>;

// Periodic lattice over the dimensionless coordinate zeta = 2 k_L z,
// zeta_j = -Z/2 + j dz for j = 0 .. n-1, paired with the discrete
// wavenumbers of the transform. A wavenumber q conjugate to zeta is a
// physical momentum of 2 q hbar k_L, so k / k_L = 2 q.
//
// Immutable after construction and safe to share between threads; the
// transform plans are executed with the new-array interface.
class Grid {
 public:
  // `length_z` and `lattice_constant` in meters.
  static std::shared_ptr<const Grid> make(std::size_t n_dim, double length_z,
                                          double lattice_constant);
  // Grid with a given dimensionless span Z. The lattice constant only
  // affects conversions to z / a, which become zeta / (2 pi).
  static std::shared_ptr<const Grid> make_scaled(std::size_t n_dim,
                                                 double span,
                                                 double lattice_constant = 1.0);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  std::size_t size() const { return n_; }
  double span() const { return span_; }
  double dz() const { return span_ / static_cast<double>(n_); }
  double dq() const;  // 2 pi / Z
  double lattice_constant() const { return lattice_constant_; }

  double zeta(std::size_t j) const {
    return -0.5 * span_ + static_cast<double>(j) * dz();
  }
  // Transform-ordered wavenumber of bin m: 0, 1, .., n/2 - 1, -n/2, .., -1
  // (times 2 pi / Z). The single Nyquist bin carries the negative sign.
  double wavenumber(std::size_t m) const;
  double k_over_kl(std::size_t m) const { return 2.0 * wavenumber(m); }
  // |k| / k_L at the Nyquist bin.
  double nyquist_k_over_kl() const;
  // Distance zeta expressed in lattice spacings a (one kick period).
  static double z_over_a(double zeta_distance);

  // Bin indices sorted by ascending wavenumber.
  std::vector<std::size_t> ascending_order() const;

  // Unnormalized DFT, out_m = sum_j in_j e^{-2 pi i m j / n}, and its
  // unnormalized inverse. `in` and `out` may alias.
  void forward(const cdouble* in, cdouble* out) const;
  void backward(const cdouble* in, cdouble* out) const;

 private:
  Grid(std::size_t n_dim, double span, double lattice_constant);

  std::size_t n_;
  double span_;
  double lattice_constant_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
  void* forward_inplace_ = nullptr;
  void* backward_inplace_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

// Rounds a box length to a whole number of lattice spacings so that the
// kick potential cos(zeta) is periodic on the box.
double snap_to_lattice(double length_z, double lattice_constant);

enum class Space { kPosition, kMomentum };

// One complex wavefunction on a grid. In position space the norm is
// sum |psi_j|^2 dz, in momentum space sum |phi_m|^2 dq; both equal one for
// a normalized orbital.
struct Orbital {
  GridPtr grid;
  Eigen::VectorXcd amplitudes;
  Space space = Space::kPosition;

  Orbital() = default;
  Orbital(GridPtr g, Eigen::VectorXcd a, Space s = Space::kPosition)
      : grid(std::move(g)), amplitudes(std::move(a)), space(s) {}

  double norm_squared() const;
  void normalize();
};

// Unitary transform pair between the two representations.
Orbital to_momentum(const Orbital& orb);
Orbital to_position(const Orbital& orb);

// <psi|phi> in position space with the dz measure.
cdouble overlap(const Orbital& a, const Orbital& b);

// Fraction of the norm located in the outer `fraction` of the grid points
// (half of it at each end).
double boundary_occupancy(const Orbital& orb, double fraction = 0.05);

}  // namespace qkr
