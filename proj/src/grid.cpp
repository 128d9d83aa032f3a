#include "qkr/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "qkr/error.hpp"

namespace qkr {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cdouble* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(p));
}

}  // namespace

Grid::Grid(std::size_t n_dim, double span, double lattice_constant)
    : n_(n_dim), span_(span), lattice_constant_(lattice_constant) {
  std::vector<cdouble> in(n_), out(n_);
  const int n = static_cast<int>(n_);
  // FFTW_ESTIMATE keeps plans, and therefore results, reproducible run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_1d(n, as_fftw(in.data()), as_fftw(out.data()),
                                   FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(n, as_fftw(in.data()),
                                    as_fftw(out.data()), FFTW_BACKWARD, flags);
  forward_inplace_ = fftw_plan_dft_1d(n, as_fftw(in.data()),
                                      as_fftw(in.data()), FFTW_FORWARD, flags);
  backward_inplace_ = fftw_plan_dft_1d(
      n, as_fftw(in.data()), as_fftw(in.data()), FFTW_BACKWARD, flags);
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(forward_inplace_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_inplace_));
}

GridPtr Grid::make(std::size_t n_dim, double length_z,
                   double lattice_constant) {
  if (!(lattice_constant > 0.0)) {
    throw ConfigError("lattice constant must be positive");
  }
  if (!(length_z > 0.0)) throw ConfigError("grid length must be positive");
  const double span = 2.0 * std::numbers::pi * length_z / lattice_constant;
  return make_scaled(n_dim, span, lattice_constant);
}

GridPtr Grid::make_scaled(std::size_t n_dim, double span,
                          double lattice_constant) {
  if (n_dim < 8) {
    throw ConfigError("grid needs at least 8 points, got " +
                      std::to_string(n_dim));
  }
  if (!(span > 0.0)) throw ConfigError("grid length must be positive");
  return GridPtr(new Grid(n_dim, span, lattice_constant));
}

double Grid::dq() const { return 2.0 * std::numbers::pi / span_; }

double Grid::wavenumber(std::size_t m) const {
  const auto n = static_cast<long>(n_);
  auto idx = static_cast<long>(m);
  if (idx >= n / 2) idx -= n;
  return static_cast<double>(idx) * dq();
}

double Grid::nyquist_k_over_kl() const {
  return 2.0 * static_cast<double>(n_ / 2) * dq();
}

double Grid::z_over_a(double zeta_distance) {
  return zeta_distance / (2.0 * std::numbers::pi);
}

std::vector<std::size_t> Grid::ascending_order() const {
  std::vector<std::size_t> order(n_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::rotate(order.begin(), order.begin() + static_cast<long>(n_ / 2),
              order.end());
  return order;
}

void Grid::forward(const cdouble* in, cdouble* out) const {
  // FFTW requires the in-place-ness of the plan to match the call.
  void* plan = in == out ? forward_inplace_ : forward_plan_;
  fftw_execute_dft(static_cast<fftw_plan>(plan), as_fftw(in), as_fftw(out));
}

void Grid::backward(const cdouble* in, cdouble* out) const {
  void* plan = in == out ? backward_inplace_ : backward_plan_;
  fftw_execute_dft(static_cast<fftw_plan>(plan), as_fftw(in), as_fftw(out));
}

double snap_to_lattice(double length_z, double lattice_constant) {
  const double periods = std::max(1.0, std::round(length_z / lattice_constant));
  return periods * lattice_constant;
}

double Orbital::norm_squared() const {
  const double measure =
      space == Space::kPosition ? grid->dz() : grid->dq();
  return amplitudes.squaredNorm() * measure;
}

void Orbital::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw InvariantError("cannot normalize a zero orbital", n2);
  amplitudes /= std::sqrt(n2);
}

Orbital to_momentum(const Orbital& orb) {
  if (orb.space != Space::kPosition) {
    throw ConfigError("orbital already in momentum representation");
  }
  const Grid& g = *orb.grid;
  Orbital out(orb.grid, Eigen::VectorXcd(orb.amplitudes.size()),
              Space::kMomentum);
  g.forward(orb.amplitudes.data(), out.amplitudes.data());
  out.amplitudes *= g.dz() / std::sqrt(2.0 * std::numbers::pi);
  return out;
}

Orbital to_position(const Orbital& orb) {
  if (orb.space != Space::kMomentum) {
    throw ConfigError("orbital already in position representation");
  }
  const Grid& g = *orb.grid;
  Orbital out(orb.grid, Eigen::VectorXcd(orb.amplitudes.size()),
              Space::kPosition);
  g.backward(orb.amplitudes.data(), out.amplitudes.data());
  out.amplitudes *= g.dq() / std::sqrt(2.0 * std::numbers::pi);
  return out;
}

cdouble overlap(const Orbital& a, const Orbital& b) {
  return a.amplitudes.dot(b.amplitudes) * a.grid->dz();
}

double boundary_occupancy(const Orbital& orb, double fraction) {
  const std::size_t n = orb.grid->size();
  const auto edge = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(0.5 * fraction * n)));
  double outer = 0.0;
  for (std::size_t j = 0; j < edge; ++j) {
    outer += std::norm(orb.amplitudes[static_cast<long>(j)]);
    outer += std::norm(orb.amplitudes[static_cast<long>(n - 1 - j)]);
  }
  return outer / orb.amplitudes.squaredNorm();
}

}  // namespace qkr
