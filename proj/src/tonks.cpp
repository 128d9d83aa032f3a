#include "qkr/tonks.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include "qkr/error.hpp"

namespace qkr {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr std::uint32_t kObdmVersion = 1;

// P with rows 0 .. i-1 negated and e_i appended.
MatrixXcd string_matrix(const MatrixXcd& p, long i) {
  const long n = p.rows();
  const long m = p.cols();
  MatrixXcd out = MatrixXcd::Zero(n, m + 1);
  out.leftCols(m) = p;
  out.topRows(i) *= -1.0;
  out(i, m) = 1.0;
  return out;
}

// Prefix sums C_j = sum_{s<j} P_s^dag P_s, j = 0 .. n.
std::vector<MatrixXcd> prefix_grams(const MatrixXcd& pt) {
  const long n = pt.cols();
  const long m = pt.rows();
  std::vector<MatrixXcd> c(static_cast<std::size_t>(n + 1));
  c[0] = MatrixXcd::Zero(m, m);
  for (long j = 0; j < n; ++j) {
    c[static_cast<std::size_t>(j + 1)] =
        c[static_cast<std::size_t>(j)] + pt.col(j) * pt.col(j).adjoint();
  }
  return c;
}

template <typename T>
void write_le(std::ofstream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    std::reverse(b, b + sizeof(T));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
  } else {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <typename T>
T read_le(std::ifstream& in) {
  unsigned char b[sizeof(T)];
  in.read(reinterpret_cast<char*>(b), sizeof(T));
  if (!in) throw ConfigError("truncated OBDM file");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(b, b + sizeof(T));
  }
  T value;
  std::memcpy(&value, b, sizeof(T));
  return value;
}

}  // namespace

SlaterState SlaterState::from_orbitals(const std::vector<Orbital>& orbitals) {
  if (orbitals.empty()) throw ConfigError("Slater state needs an orbital");
  SlaterState s;
  s.grid = orbitals.front().grid;
  const long n = static_cast<long>(s.grid->size());
  s.sites.resize(n, static_cast<long>(orbitals.size()));
  const double w = std::sqrt(s.grid->dz());
  for (std::size_t c = 0; c < orbitals.size(); ++c) {
    const Orbital& o = orbitals[c];
    if (o.grid->size() != s.grid->size() || o.space != Space::kPosition) {
      throw ConfigError("Slater orbitals must share a position-space grid");
    }
    s.sites.col(static_cast<long>(c)) = o.amplitudes * w;
  }
  return s;
}

double SlaterState::orthonormality_defect() const {
  const long m = sites.cols();
  return (sites.adjoint() * sites - MatrixXcd::Identity(m, m))
      .cwiseAbs()
      .maxCoeff();
}

MatrixXcd green_function_reference(const SlaterState& state) {
  const MatrixXcd& p = state.sites;
  const long n = p.rows();
  MatrixXcd g(n, n);
  for (long i = 0; i < n; ++i) {
    const MatrixXcd pi = string_matrix(p, i);
    for (long j = i; j < n; ++j) {
      const MatrixXcd pj = string_matrix(p, j);
      const MatrixXcd m = pi.adjoint() * pj;
      g(i, j) = m.partialPivLu().determinant();
      g(j, i) = std::conj(g(i, j));
    }
    g(i, i) = g(i, i).real();
  }
  return g;
}

MatrixXcd green_function(const SlaterState& state, const GreenOptions& options,
                         GreenStats* stats) {
  const MatrixXcd pt = state.sites.adjoint();  // column j = P_j^dag
  const long n = pt.cols();
  const long m = pt.rows();
  const std::vector<MatrixXcd> prefix = prefix_grams(pt);
  const MatrixXcd eye = MatrixXcd::Identity(m, m);
  GreenStats st;

  MatrixXcd g = MatrixXcd::Zero(n, n);
  MatrixXcd a(m, m), b(m, m);
  VectorXcd x(m);
  Eigen::PartialPivLU<MatrixXcd> lu(m);

  // Rows below the density cutoff are left at zero and their rank-one
  // terms are dropped from the running update; rebuilds stay exact.
  std::vector<long> kept;
  for (long i = 0; i < n; ++i) {
    const double dens = pt.col(i).squaredNorm();
    g(i, i) = 1.0 - dens;
    if (dens < options.skip_density) {
      ++st.skipped_rows;
    } else {
      kept.push_back(i);
    }
  }

  for (std::size_t ki = 0; ki < kept.size(); ++ki) {
    const long i = kept[ki];
    bool rebuild = true;
    int since = 0;
    double det = 0.0;
    double bound = 0.0;
    for (std::size_t kj = ki + 1; kj < kept.size(); ++kj) {
      const long j = kept[kj];
      if (rebuild || since >= options.refresh_interval) {
        a = eye - 2.0 * (prefix[static_cast<std::size_t>(j)] -
                         prefix[static_cast<std::size_t>(i)]);
        lu.compute(a);
        det = lu.determinant().real();
        b = lu.inverse();
        bound = b.norm();
        if (!std::isfinite(bound)) {
          // Exactly singular: expand the bordered determinant instead.
          MatrixXcd border(m + 1, m + 1);
          border.topLeftCorner(m, m) = a;
          border.topRightCorner(m, 1) = pt.col(j);
          border.bottomLeftCorner(1, m) = -pt.col(i).adjoint();
          border(m, m) = 0.0;
          g(i, j) = border.partialPivLu().determinant();
          ++st.direct;
          rebuild = true;
          continue;
        }
        b = 0.5 * (b + b.adjoint()).eval();
        ++st.refreshes;
        rebuild = false;
        since = 0;
      }
      x.noalias() = b.selfadjointView<Eigen::Lower>() * pt.col(j);
      g(i, j) = det * pt.col(i).dot(x);
      const double delta = 1.0 - 2.0 * pt.col(j).dot(x).real();
      bound += 2.0 * x.squaredNorm() / std::abs(delta);
      if (bound > options.cond_cap || !std::isfinite(bound)) {
        ++st.direct;
        rebuild = true;
        continue;
      }
      b.selfadjointView<Eigen::Lower>().rankUpdate(x, 2.0 / delta);
      det *= delta;
      ++since;
      ++st.updates;
    }
  }
  // Mirror: only the lower triangle of b was maintained, g's upper is set.
  for (long j = 0; j < n; ++j) {
    for (long i = j + 1; i < n; ++i) g(i, j) = std::conj(g(j, i));
  }
  if (stats != nullptr) *stats = st;
  return g;
}

Obdm obdm_from_green(MatrixXcd green, GridPtr grid, std::size_t n_particles,
                     const ObdmTolerances& tol) {
  const long n = green.rows();
  if (green.cols() != n || (grid && static_cast<long>(grid->size()) != n)) {
    throw ConfigError("Green's function does not match the grid");
  }
  Obdm out;
  out.grid = std::move(grid);
  out.n_particles = n_particles;
  out.rho = std::move(green);
  MatrixXcd& rho = out.rho;
  for (long i = 0; i < n; ++i) rho(i, i) = 1.0 - rho(i, i);

  ObdmChecks& c = out.checks;
  cdouble trace = 0.0;
  for (long j = 0; j < n; ++j) {
    for (long i = j; i < n; ++i) {
      c.hermiticity =
          std::max(c.hermiticity, std::abs(rho(i, j) - std::conj(rho(j, i))));
    }
    const cdouble d = rho(j, j);
    trace += d;
    c.max_imag_diagonal = std::max(c.max_imag_diagonal, std::abs(d.imag()));
    c.diagonal_excess =
        std::max({c.diagonal_excess, -d.real(), d.real() - 1.0});
  }
  c.trace_defect = std::abs(trace - static_cast<double>(n_particles));

  if (c.hermiticity > tol.hermiticity) {
    throw InvariantError("OBDM is not Hermitian", c.hermiticity);
  }
  if (c.trace_defect > tol.trace) {
    throw InvariantError("OBDM trace differs from N", c.trace_defect);
  }
  if (c.diagonal_excess > tol.diagonal || c.max_imag_diagonal > tol.diagonal) {
    throw InvariantError("OBDM diagonal outside [0, 1]",
                         std::max(c.diagonal_excess, c.max_imag_diagonal));
  }
  return out;
}

Obdm compute_obdm(const SlaterState& state, const GreenOptions& options,
                  const ObdmTolerances& tol, GreenStats* stats) {
  return obdm_from_green(green_function(state, options, stats), state.grid,
                         state.n_particles(), tol);
}

Eigen::VectorXd hermitian_eigenvalues(const MatrixXcd& m) {
  const long n = m.rows();
  if (m.cols() != n) throw ConfigError("eigenvalues need a square matrix");
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  MatrixXcd a = m;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(a.data()),
      static_cast<lapack_int>(n), w.data());
  if (info != 0) {
    throw ConvergenceError("zheevd failed", static_cast<double>(info));
  }
  return w;
}

double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues, double clamp) {
  double s = 0.0;
  for (double l : eigenvalues) {
    if (l > clamp) s -= l * std::log(l);
  }
  return s;
}

VonNeumann von_neumann_entropy(Obdm& rho, std::size_t max_modes,
                               const ObdmTolerances& tol) {
  const long n = rho.rho.rows();
  VonNeumann out;
  Eigen::VectorXd lambda;
  if (max_modes == 0 || static_cast<long>(max_modes) >= n) {
    lambda = hermitian_eigenvalues(rho.rho);
    out.dimension = static_cast<std::size_t>(n);
  } else {
    // U rho U^dag on the plane waves with the largest occupation n(k),
    // U_mj = e^{-2 pi i m j/n}/sqrt n. The first pass accumulates the
    // diagonal (U rho U^dag)_mm = sum_j (F rho)_mj e^{2 pi i m j/n} / n.
    const Grid& g = *rho.grid;
    VectorXcd col(n);
    VectorXcd roots(n);
    for (long t = 0; t < n; ++t) {
      roots[t] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) /
                                     static_cast<double>(n));
    }
    Eigen::VectorXd occupation = Eigen::VectorXd::Zero(n);
    for (long j = 0; j < n; ++j) {
      g.forward(rho.rho.col(j).data(), col.data());
      for (long m = 0; m < n; ++m) {
        occupation[m] += (col[m] * roots[(m * j) % n]).real();
      }
    }
    std::vector<long> keep(static_cast<std::size_t>(n));
    std::iota(keep.begin(), keep.end(), 0L);
    std::stable_sort(keep.begin(), keep.end(), [&](long a, long b) {
      return occupation[a] > occupation[b];
    });
    keep.resize(max_modes);
    std::sort(keep.begin(), keep.end());
    const long mk = static_cast<long>(keep.size());

    MatrixXcd y(mk, n);
    for (long j = 0; j < n; ++j) {
      g.forward(rho.rho.col(j).data(), col.data());
      for (long r = 0; r < mk; ++r) y(r, j) = col[keep[static_cast<std::size_t>(r)]];
    }
    MatrixXcd small(mk, mk);
    VectorXcd row(n);
    for (long r = 0; r < mk; ++r) {
      col = y.row(r).transpose();
      g.backward(col.data(), row.data());
      for (long c = 0; c < mk; ++c) {
        small(r, c) = row[keep[static_cast<std::size_t>(c)]] /
                      static_cast<double>(n);
      }
    }
    small = 0.5 * (small + small.adjoint()).eval();
    lambda = hermitian_eigenvalues(small);
    out.dimension = static_cast<std::size_t>(mk);
  }
  out.kept_trace = lambda.sum();
  out.min_eigenvalue = lambda.size() > 0 ? lambda.minCoeff() : 0.0;
  rho.checks.min_eigenvalue = out.min_eigenvalue;
  rho.checks.positivity_checked = true;
  if (out.min_eigenvalue < -tol.positivity) {
    throw InvariantError("OBDM is not positive semidefinite",
                         -out.min_eigenvalue);
  }
  const double np = static_cast<double>(rho.n_particles);
  out.raw = entropy_of_spectrum(lambda);
  out.unit_trace = np > 0.0 ? entropy_of_spectrum(lambda / np) : 0.0;
  return out;
}

void write_obdm(const std::string& path, const Obdm& rho) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.write("OBDM", 4);
  const long n = rho.rho.rows();
  write_le<std::uint32_t>(out, kObdmVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rho.n_particles));
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      write_le<double>(out, rho.rho(i, j).real());
      write_le<double>(out, rho.rho(i, j).imag());
    }
  }
  if (!out) throw ConfigError("failed writing " + path);
}

Obdm read_obdm(const std::string& path, GridPtr grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "OBDM", 4) != 0) {
    throw ConfigError(path + " is not an OBDM dump");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kObdmVersion) {
    throw ConfigError("unsupported OBDM version " + std::to_string(version));
  }
  const auto n = static_cast<long>(read_le<std::uint32_t>(in));
  const auto np = read_le<std::uint32_t>(in);
  if (grid && static_cast<long>(grid->size()) != n) {
    throw ConfigError("OBDM dump size does not match the grid");
  }
  Obdm out;
  out.grid = std::move(grid);
  out.n_particles = np;
  out.rho.resize(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const double re = read_le<double>(in);
      const double im = read_le<double>(in);
      out.rho(i, j) = cdouble(re, im);
    }
  }
  return out;
}

}  // namespace qkr
