#include "qkr/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>

#include "qkr/error.hpp"

namespace qkr::oracle {

namespace {

using Eigen::MatrixXcd;
using Fock = std::unordered_map<std::uint64_t, cdouble>;

int parity_below(std::uint64_t occ, int site) {
  const std::uint64_t below = (std::uint64_t{1} << site) - 1;
  return std::popcount(occ & below) & 1;
}

double sign_of(int parity) { return parity ? -1.0 : 1.0; }

void enumerate(int n, int k, int start, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int s = start; s < n; ++s) {
    cur.push_back(s);
    enumerate(n, k, s + 1, cur, out);
    cur.pop_back();
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<double> bessel_one_kick(double x, int n_max) {
  if (n_max < 1) throw ConfigError("bessel oracle needs n_max >= 1");
  std::vector<double> pop(static_cast<std::size_t>(2 * n_max + 1), 0.0);
  if (x == 0.0) {
    pop[static_cast<std::size_t>(n_max)] = 1.0;
    return pop;
  }
  const double ax = std::abs(x);
  int start = std::max(n_max, static_cast<int>(ax)) + 30 +
              static_cast<int>(std::sqrt(40.0 * (n_max + ax)));
  start += start % 2;
  std::vector<double> j(static_cast<std::size_t>(start + 2), 0.0);
  j[static_cast<std::size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    j[ku - 1] = 2.0 * k / ax * j[ku] - j[ku + 1];
    if (std::abs(j[ku - 1]) > 1e250) {
      for (double& v : j) v *= 1e-250;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
  for (int n = 0; n <= n_max; ++n) {
    const double v = j[static_cast<std::size_t>(n)] / norm;
    pop[static_cast<std::size_t>(n_max + n)] = v * v;
    pop[static_cast<std::size_t>(n_max - n)] = v * v;
  }
  return pop;
}

Obdm brute_obdm_n2(const Orbital& a, const Orbital& b) {
  const long n = a.amplitudes.size();
  if (n > 128) throw ConfigError("brute-force OBDM is limited to n_dim <= 128");
  if (b.amplitudes.size() != n) throw ConfigError("orbital sizes differ");
  const double dz = a.grid->dz();
  const cdouble ab = a.amplitudes.dot(b.amplitudes) * dz;
  const double na = a.amplitudes.squaredNorm() * dz;
  const double nb = b.amplitudes.squaredNorm() * dz;
  if (std::abs(ab) > 1e-8 || std::abs(na - 1.0) > 1e-8 ||
      std::abs(nb - 1.0) > 1e-8) {
    throw ConfigError("brute-force OBDM needs an orthonormal pair");
  }
  MatrixXcd psi_b(n, n);
  for (long x = 0; x < n; ++x) {
    for (long y = 0; y < n; ++y) {
      const cdouble f = (a.amplitudes[x] * b.amplitudes[y] -
                         a.amplitudes[y] * b.amplitudes[x]) /
                        std::sqrt(2.0);
      const double sgn = x > y ? 1.0 : (x < y ? -1.0 : 0.0);
      psi_b(x, y) = sgn * f;
    }
  }
  Obdm out;
  out.grid = a.grid;
  out.n_particles = 2;
  out.rho.resize(n, n);
  for (long x = 0; x < n; ++x) {
    for (long xp = 0; xp < n; ++xp) {
      cdouble s = 0.0;
      for (long y = 0; y < n; ++y) s += psi_b(x, y) * std::conj(psi_b(xp, y));
      out.rho(x, xp) = 2.0 * s * dz * dz;
    }
  }
  return out;
}

MatrixXcd fock_green_function(const MatrixXcd& sites) {
  const int n = static_cast<int>(sites.rows());
  const int np = static_cast<int>(sites.cols());
  if (n > 64) throw ConfigError("Fock oracle is limited to n_dim <= 64");
  if (binomial(n, np + 1) > 2e6) {
    throw ConfigError("Fock oracle sector too large");
  }
  std::vector<std::vector<int>> sets;
  std::vector<int> cur;
  enumerate(n, np, 0, cur, sets);

  // c_S = det[P_{s_k, m}] for the ascending occupied set S.
  Fock psi;
  MatrixXcd m(np, np);
  for (const auto& s : sets) {
    std::uint64_t occ = 0;
    for (int k = 0; k < np; ++k) {
      m.row(k) = sites.row(s[static_cast<std::size_t>(k)]);
      occ |= std::uint64_t{1} << s[static_cast<std::size_t>(k)];
    }
    psi[occ] = np == 0 ? cdouble(1.0) : m.determinant();
  }

  MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cdouble acc = 0.0;
      for (const auto& [occ, amp] : psi) {
        const std::uint64_t bj = std::uint64_t{1} << j;
        if (occ & bj) continue;
        // b_j^dag = f_j^dag prod_{beta<j} exp(-i pi n_beta).
        double sign = sign_of(parity_below(occ, j));  // string
        sign *= sign_of(parity_below(occ, j));        // f_j^dag
        const std::uint64_t mid = occ | bj;
        const std::uint64_t bi = std::uint64_t{1} << i;
        if (!(mid & bi)) continue;
        // b_i = prod_{beta<i} exp(i pi n_beta) f_i.
        sign *= sign_of(parity_below(mid, i));  // f_i
        const std::uint64_t fin = mid & ~bi;
        sign *= sign_of(parity_below(fin, i));  // string
        const auto it = psi.find(fin);
        if (it == psi.end()) continue;
        acc += std::conj(it->second) * sign * amp;
      }
      g(i, j) = acc;
    }
  }
  return g;
}

std::vector<Orbital> random_orbitals(GridPtr grid, std::size_t n,
                                     unsigned long long seed) {
  const long dim = static_cast<long>(grid->size());
  if (static_cast<long>(n) > dim) throw ConfigError("too many orbitals");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXcd m(dim, static_cast<long>(n));
  for (long c = 0; c < m.cols(); ++c) {
    for (long r = 0; r < dim; ++r) m(r, c) = cdouble(gauss(rng), gauss(rng));
  }
  const Eigen::HouseholderQR<MatrixXcd> qr(m);
  const MatrixXcd q =
      qr.householderQ() * MatrixXcd::Identity(dim, static_cast<long>(n));
  std::vector<Orbital> out;
  const double w = 1.0 / std::sqrt(grid->dz());
  for (long c = 0; c < q.cols(); ++c) {
    out.emplace_back(grid, Eigen::VectorXcd(q.col(c) * w));
  }
  return out;
}

}  // namespace qkr::oracle
