#include "qkr/trap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "qkr/error.hpp"

namespace qkr {

TrapKind parse_trap_kind(const std::string& name) {
  if (name == "none") return TrapKind::kNone;
  if (name == "flat_bottom") return TrapKind::kFlatBottom;
  if (name == "gaussian") return TrapKind::kGaussian;
  throw ConfigError("unknown trap kind '" + name + "'");
}

std::string to_string(TrapKind kind) {
  switch (kind) {
    case TrapKind::kNone:
      return "none";
    case TrapKind::kFlatBottom:
      return "flat_bottom";
    case TrapKind::kGaussian:
      return "gaussian";
  }
  return "unknown";
}

void TrapSpec::validate() const {
  switch (kind) {
    case TrapKind::kNone:
      return;
    case TrapKind::kFlatBottom:
      if (!(v2_er > 0.0 && v1_er > v2_er)) {
        throw ConfigError("flat-bottom trap needs V1 > V2 > 0");
      }
      if (!(w2 > 0.0 && w1 > w2)) {
        throw ConfigError("flat-bottom trap needs w1 > w2 > 0");
      }
      return;
    case TrapKind::kGaussian:
      if (!(w1 > 0.0 && harmonic_freq_hz > 0.0)) {
        throw ConfigError("gaussian trap needs positive waist and frequency");
      }
      return;
  }
}

double TrapSpec::gaussian_depth_er(double lattice_constant,
                                   double recoil_rate) const {
  const double omega = 2.0 * std::numbers::pi * harmonic_freq_hz;
  const double k_l = std::numbers::pi / lattice_constant;
  const double x = omega * k_l * w1 / recoil_rate;
  return x * x / 8.0;
}

TrapSpec flat_bottom_trap(const PhysicalParams& params) {
  TrapSpec spec;
  spec.kind = TrapKind::kFlatBottom;
  spec.v1_er = params.trap_depth_er;
  spec.v2_er = params.antitrap_depth_er;
  spec.w1 = params.trap_waist;
  spec.w2 = params.antitrap_waist;
  return spec;
}

Eigen::VectorXd potential_on_grid(const TrapSpec& spec, const Grid& grid,
                                  const ScaledParams& scaled) {
  spec.validate();
  const auto n = static_cast<long>(grid.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (spec.kind == TrapKind::kNone) return v;

  const double k_l = std::numbers::pi / grid.lattice_constant();
  const double unit = scaled.recoil_in_scaled();
  // zeta^2 / (2 k_L^2 w^2) == 2 z^2 / w^2
  const double s1 = 2.0 * k_l * k_l * spec.w1 * spec.w1;
  const double s2 = 2.0 * k_l * k_l * spec.w2 * spec.w2;
  const double gaussian_depth =
      spec.kind == TrapKind::kGaussian
          ? spec.gaussian_depth_er(grid.lattice_constant(),
                                   scaled.recoil_rate)
          : 0.0;
  for (long j = 0; j < n; ++j) {
    const double z2 = std::pow(grid.zeta(static_cast<std::size_t>(j)), 2);
    if (spec.kind == TrapKind::kFlatBottom) {
      v[j] = unit * (spec.v1_er * (1.0 - std::exp(-z2 / s1)) +
                     spec.v2_er * (std::exp(-z2 / s2) - 1.0));
    } else {
      v[j] = unit * gaussian_depth * (1.0 - std::exp(-z2 / s1));
    }
  }
  return v;
}

Eigen::VectorXd apply_generator(const Eigen::VectorXd& psi,
                                const Eigen::VectorXd& potential,
                                const Grid& grid, double hbar_eff) {
  const auto n = static_cast<long>(grid.size());
  Eigen::VectorXcd buf = psi.cast<cdouble>();
  grid.forward(buf.data(), buf.data());
  for (long m = 0; m < n; ++m) {
    const double q = grid.wavenumber(static_cast<std::size_t>(m));
    buf[m] *= 0.5 * hbar_eff * q * q / static_cast<double>(n);
  }
  grid.backward(buf.data(), buf.data());
  return buf.real() + potential.cwiseProduct(psi) / hbar_eff;
}

namespace {

// Real symmetric generator matrix with the spectral kinetic term.
Eigen::MatrixXd dense_generator(const Eigen::VectorXd& potential,
                                const Grid& grid, double hbar_eff) {
  const auto n = static_cast<long>(grid.size());
  Eigen::VectorXcd kin(n);
  for (long m = 0; m < n; ++m) {
    const double q = grid.wavenumber(static_cast<std::size_t>(m));
    kin[m] = 0.5 * hbar_eff * q * q;
  }
  grid.backward(kin.data(), kin.data());
  Eigen::MatrixXd h(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const long d = (i - j + n) % n;
      h(i, j) = kin[d].real() / static_cast<double>(n);
    }
    h(i, i) += potential[i] / hbar_eff;
  }
  return h;
}

Eigen::MatrixXd apply_block(const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& potential, const Grid& grid,
                            double hbar_eff) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (long c = 0; c < x.cols(); ++c) {
    out.col(c) = apply_generator(x.col(c), potential, grid, hbar_eff);
  }
  return out;
}

// Modified Gram-Schmidt, two passes; drops columns that become negligible.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& s) {
  Eigen::MatrixXd q(s.rows(), s.cols());
  long kept = 0;
  for (long c = 0; c < s.cols(); ++c) {
    Eigen::VectorXd v = s.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (long k = 0; k < kept; ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    const double nv = v.norm();
    if (nv < 1e-10 * original) continue;
    q.col(kept++) = v / nv;
  }
  return q.leftCols(kept);
}

// Interpolates band-limited coarse vectors onto the fine grid by zero
// padding in wavenumber space; the coarse Nyquist bin is dropped.
Eigen::MatrixXd fourier_interpolate(const Eigen::MatrixXd& coarse,
                                    const Grid& coarse_grid,
                                    const Grid& fine_grid) {
  const auto nc = static_cast<long>(coarse_grid.size());
  const auto nf = static_cast<long>(fine_grid.size());
  Eigen::MatrixXd out(nf, coarse.cols());
  Eigen::VectorXcd spec(nc), fine(nf);
  for (long c = 0; c < coarse.cols(); ++c) {
    spec = coarse.col(c).cast<cdouble>();
    coarse_grid.forward(spec.data(), spec.data());
    fine.setZero();
    for (long m = 0; m < nc; ++m) {
      long idx = m >= nc / 2 ? m - nc : m;
      if (nc % 2 == 0 && idx == -nc / 2) continue;
      fine[(idx + nf) % nf] = spec[m];
    }
    fine_grid.backward(fine.data(), fine.data());
    out.col(c) = fine.real() / static_cast<double>(nc);
  }
  return out;
}

Eigen::VectorXd resample_linear(const Eigen::VectorXd& fine,
                                const Grid& fine_grid,
                                const Grid& coarse_grid) {
  const auto nc = static_cast<long>(coarse_grid.size());
  const auto nf = static_cast<long>(fine_grid.size());
  Eigen::VectorXd out(nc);
  for (long j = 0; j < nc; ++j) {
    const double x = (coarse_grid.zeta(static_cast<std::size_t>(j)) -
                      fine_grid.zeta(0)) /
                     fine_grid.dz();
    const auto i0 = static_cast<long>(std::floor(x));
    const double t = x - static_cast<double>(i0);
    const double a = fine[((i0 % nf) + nf) % nf];
    const double b = fine[(((i0 + 1) % nf) + nf) % nf];
    out[j] = (1.0 - t) * a + t * b;
  }
  return out;
}

struct RitzPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

RitzPairs lobpcg(Eigen::MatrixXd x, const Eigen::VectorXd& potential,
                 const Grid& grid, double hbar_eff, std::size_t n_wanted,
                 const EigenOptions& options) {
  const auto n = static_cast<long>(grid.size());
  const auto wanted = static_cast<long>(n_wanted);
  x = orthonormalize(x);
  const long block = x.cols();
  Eigen::MatrixXd hx = apply_block(x, potential, grid, hbar_eff);
  Eigen::MatrixXd p;
  Eigen::VectorXd lambda;

  auto rayleigh_ritz = [&](const Eigen::MatrixXd& s, const Eigen::MatrixXd& hs) {
    Eigen::MatrixXd t = s.transpose() * hs;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::MatrixXd c = es.eigenvectors().leftCols(block);
    lambda = es.eigenvalues().head(block);
    return std::make_pair(Eigen::MatrixXd(s * c), Eigen::MatrixXd(hs * c));
  };

  std::tie(x, hx) = rayleigh_ritz(x, hx);
  double worst = 0.0;
  for (int it = 0; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd r = hx - x * lambda.asDiagonal();
    worst = 0.0;
    for (long c = 0; c < wanted; ++c) worst = std::max(worst, r.col(c).norm());
    if (worst <= 0.1 * options.residual_tol) {
      return {lambda.head(wanted), x.leftCols(wanted)};
    }
    if (it == options.max_iterations) break;

    const double shift =
        std::max(lambda[block - 1] - lambda[0], 1e-8) + std::abs(lambda[0]);
    Eigen::MatrixXd w(n, block);
    Eigen::VectorXcd buf(n);
    for (long c = 0; c < block; ++c) {
      buf = r.col(c).cast<cdouble>();
      grid.forward(buf.data(), buf.data());
      for (long m = 0; m < n; ++m) {
        const double q = grid.wavenumber(static_cast<std::size_t>(m));
        buf[m] /= (0.5 * hbar_eff * q * q + shift) * static_cast<double>(n);
      }
      grid.backward(buf.data(), buf.data());
      w.col(c) = buf.real();
    }

    Eigen::MatrixXd s(n, x.cols() + w.cols() + p.cols());
    s.leftCols(x.cols()) = x;
    s.middleCols(x.cols(), w.cols()) = w;
    if (p.cols() > 0) s.rightCols(p.cols()) = p;
    s = orthonormalize(s);
    const Eigen::MatrixXd hs = apply_block(s, potential, grid, hbar_eff);
    const Eigen::MatrixXd x_old = x;
    std::tie(x, hx) = rayleigh_ritz(s, hs);
    p = x - x_old * (x_old.transpose() * x);
  }
  throw ConvergenceError("eigensolver did not reach residual tolerance",
                         worst);
}

}  // namespace

EigenSet lowest_eigenstates(const Eigen::VectorXd& potential, GridPtr grid,
                            double hbar_eff, std::size_t n_states,
                            const EigenOptions& options) {
  const std::size_t n = grid->size();
  if (n_states < 1) throw ConfigError("need at least one eigenstate");
  if (4 * n_states > n) {
    throw ConfigError("requested eigenstates must be far fewer than grid points");
  }
  if (static_cast<std::size_t>(potential.size()) != n) {
    throw ConfigError("potential does not match grid size");
  }

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (n <= options.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        dense_generator(potential, *grid, hbar_eff));
    values = es.eigenvalues().head(static_cast<long>(n_states));
    vectors = es.eigenvectors().leftCols(static_cast<long>(n_states));
  } else {
    // Solve on the coarsest sub-grid within the dense limit, then polish
    // the interpolated states on the full grid.
    std::size_t nc = n;
    while (nc > options.dense_limit && nc % 2 == 0) nc /= 2;
    if (nc > options.dense_limit) nc = options.dense_limit;
    const GridPtr coarse =
        Grid::make_scaled(nc, grid->span(), grid->lattice_constant());
    const Eigen::VectorXd v_coarse = resample_linear(potential, *grid, *coarse);
    const std::size_t block =
        std::min<std::size_t>(n_states + 4, nc / 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        dense_generator(v_coarse, *coarse, hbar_eff));
    const Eigen::MatrixXd guess = fourier_interpolate(
        es.eigenvectors().leftCols(static_cast<long>(block)), *coarse, *grid);
    RitzPairs pairs = lobpcg(guess, potential, *grid, hbar_eff, n_states,
                             options);
    values = pairs.values;
    vectors = pairs.vectors;
  }

  EigenSet out;
  const double sqrt_dz = std::sqrt(grid->dz());
  for (long c = 0; c < static_cast<long>(n_states); ++c) {
    Eigen::VectorXd v = vectors.col(c);
    v /= v.norm();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.phases.push_back(values[c]);
    out.energies.push_back(8.0 * values[c] / hbar_eff);
    out.orbitals.emplace_back(grid, (v / sqrt_dz).cast<cdouble>());
    const Eigen::VectorXd r =
        apply_generator(v, potential, *grid, hbar_eff) - values[c] * v;
    out.max_residual = std::max(out.max_residual, r.norm());
  }
  for (std::size_t i = 0; i < n_states; ++i) {
    for (std::size_t j = i + 1; j < n_states; ++j) {
      out.max_overlap = std::max(
          out.max_overlap, std::abs(overlap(out.orbitals[i], out.orbitals[j])));
    }
  }
  if (out.max_residual > options.residual_tol) {
    throw ConvergenceError("eigenstate residual above tolerance",
                           out.max_residual);
  }
  if (out.max_overlap > options.overlap_tol) {
    throw InvariantError("eigenstates not orthonormal", out.max_overlap);
  }
  return out;
}

EigenSet lowest_eigenstates(const TrapSpec& spec, GridPtr grid,
                            const ScaledParams& scaled, std::size_t n_states,
                            const EigenOptions& options) {
  const Eigen::VectorXd v = potential_on_grid(spec, *grid, scaled);
  return lowest_eigenstates(v, std::move(grid), scaled.hbar_eff, n_states,
                            options);
}

}  // namespace qkr
