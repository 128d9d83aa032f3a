#include "qkr/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qkr/error.hpp"

namespace qkr {

namespace {

// Ascending-order distribution from transform-ordered bin probabilities.
MomentumDist from_fft_order(const std::vector<double>& p, const Grid& grid) {
  const std::size_t n = p.size();
  MomentumDist d;
  d.dk = 2.0 * grid.dq();
  d.k_values.resize(n);
  d.density.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t m = (a + n / 2) % n;
    d.k_values[a] = (static_cast<double>(a) - static_cast<double>(n / 2)) * d.dk;
    d.density[a] = p[m] / d.dk;
  }
  return d;
}

std::vector<double> to_fft_order(const MomentumDist& d) {
  const std::size_t n = d.size();
  std::vector<double> p(n);
  for (std::size_t a = 0; a < n; ++a) p[(a + n / 2) % n] = d.probability(a);
  return p;
}

std::vector<double> probabilities(const MomentumDist& d) {
  std::vector<double> p(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) p[a] = d.probability(a);
  return p;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t s = 0; s < idx.size();) {
    std::size_t e = s;
    while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
    const double avg = 0.5 * static_cast<double>(s + e) + 1.0;
    for (std::size_t t = s; t <= e; ++t) r[idx[t]] = avg;
    s = e + 1;
  }
  return r;
}

}  // namespace

double MomentumDist::total() const {
  double s = 0.0;
  for (double v : density) s += v;
  return s * dk;
}

MomentumDist momentum_dist_single(const Orbital& orb) {
  return momentum_dist_fermions({orb});
}

MomentumDist momentum_dist_fermions(const std::vector<Orbital>& orbitals) {
  if (orbitals.empty()) throw ConfigError("no orbitals for n(k)");
  const Grid& g = *orbitals.front().grid;
  std::vector<double> p(g.size(), 0.0);
  for (const Orbital& o : orbitals) {
    const Orbital phi = o.space == Space::kMomentum ? o : to_momentum(o);
    for (std::size_t m = 0; m < p.size(); ++m) {
      p[m] += std::norm(phi.amplitudes[static_cast<long>(m)]) * g.dq();
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return from_fft_order(p, g);
}

MomentumDist momentum_dist_obdm(const Obdm& rho, double tol) {
  const Grid& g = *rho.grid;
  const long n = static_cast<long>(g.size());
  std::vector<cdouble> roots(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    roots[static_cast<std::size_t>(k)] =
        std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                            static_cast<double>(n));
  }
  // s_m = sum_j (F rho)_{mj} e^{+2 pi i m j / n}.
  std::vector<cdouble> s(static_cast<std::size_t>(n), 0.0);
  Eigen::VectorXcd col(n);
  for (long j = 0; j < n; ++j) {
    g.forward(rho.rho.col(j).data(), col.data());
    long idx = 0;
    for (long m = 0; m < n; ++m) {
      s[static_cast<std::size_t>(m)] += col[m] * roots[static_cast<std::size_t>(idx)];
      idx += j;
      if (idx >= n) idx -= n;
    }
  }
  std::vector<double> p(static_cast<std::size_t>(n));
  const double scale =
      1.0 / (static_cast<double>(n) * static_cast<double>(rho.n_particles));
  double low = 0.0;
  for (long m = 0; m < n; ++m) {
    const double v = s[static_cast<std::size_t>(m)].real() * scale;
    low = std::min(low, v);
    p[static_cast<std::size_t>(m)] = std::max(v, 0.0);
  }
  if (low < -tol) {
    throw InvariantError("bosonic n(k) is negative", -low);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return from_fft_order(p, g);
}

double kinetic_energy(const MomentumDist& dist) {
  double e = 0.0;
  for (std::size_t a = 0; a < dist.size(); ++a) {
    e += dist.k_values[a] * dist.k_values[a] * dist.probability(a);
  }
  return e;
}

double kinetic_energy_operator(const Orbital& orb) {
  const Grid& g = *orb.grid;
  const long n = static_cast<long>(g.size());
  Eigen::VectorXcd t(n);
  g.forward(orb.amplitudes.data(), t.data());
  for (long m = 0; m < n; ++m) {
    const double k = g.k_over_kl(static_cast<std::size_t>(m));
    t[m] *= k * k / static_cast<double>(n);
  }
  g.backward(t.data(), t.data());
  return orb.amplitudes.dot(t).real() * g.dz() / orb.norm_squared();
}

double info_entropy(const MomentumDist& dist) {
  double s = 0.0;
  for (std::size_t a = 0; a < dist.size(); ++a) {
    const double p = dist.probability(a);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double jsd(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw ConfigError("JSD needs distributions on the same bins");
  }
  double j = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double m = p[a] + q[a];
    if (p[a] > 0.0) j += p[a] * std::log2(2.0 * p[a] / m);
    if (q[a] > 0.0) j += q[a] * std::log2(2.0 * q[a] / m);
  }
  return std::clamp(0.5 * j, 0.0, 1.0);
}

double jsd(const MomentumDist& p, const MomentumDist& q) {
  if (p.size() != q.size() || std::abs(p.dk - q.dk) > 1e-12 * p.dk) {
    throw ConfigError("JSD needs distributions on the same bins");
  }
  return jsd(probabilities(p), probabilities(q));
}

CorrFunction g1_from_momentum(const MomentumDist& dist, const Grid& grid) {
  const std::size_t n = grid.size();
  if (dist.size() != n) throw ConfigError("n(k) does not match the grid");
  const std::vector<double> p = to_fft_order(dist);
  Eigen::VectorXcd in(static_cast<long>(n)), out(static_cast<long>(n));
  for (std::size_t m = 0; m < n; ++m) in[static_cast<long>(m)] = p[m];
  grid.backward(in.data(), out.data());
  CorrFunction c;
  const double g0 = out[0].real();
  for (std::size_t d = 0; d <= n / 2; ++d) {
    c.z_values.push_back(Grid::z_over_a(static_cast<double>(d) * grid.dz()));
    c.g1.push_back(out[static_cast<long>(d)].real() / g0);
  }
  return c;
}

CorrFunction g1_from_obdm(const Obdm& rho) {
  const Grid& g = *rho.grid;
  const long n = static_cast<long>(g.size());
  std::vector<double> acc(static_cast<std::size_t>(n / 2 + 1), 0.0);
  for (long j = 0; j < n; ++j) {
    for (long d = 0; d <= n / 2; ++d) {
      long i = j + d;
      if (i >= n) i -= n;
      acc[static_cast<std::size_t>(d)] += rho.rho(i, j).real();
    }
  }
  CorrFunction c;
  for (long d = 0; d <= n / 2; ++d) {
    c.z_values.push_back(Grid::z_over_a(static_cast<double>(d) * g.dz()));
    c.g1.push_back(acc[static_cast<std::size_t>(d)] / acc[0]);
  }
  return c;
}

ContactPlateau contact_plateau(const MomentumDist& dist, double k_min,
                               double k_max) {
  std::vector<double> v;
  for (std::size_t a = 0; a < dist.size(); ++a) {
    const double k = std::abs(dist.k_values[a]);
    if (k >= k_min && k <= k_max) v.push_back(k * k * k * k * dist.density[a]);
  }
  if (v.size() < 4) {
    throw ConfigError("too few momentum bins beyond k_min for a plateau");
  }
  ContactPlateau c;
  c.bins = v.size();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                      static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  c.contact = mean;
  c.cv = mean != 0.0 ? std::sqrt(var) / std::abs(mean) : 0.0;
  return c;
}

MomentumDist tof_blur(const MomentumDist& dist, double sigma_k) {
  if (!(sigma_k > 0.0)) return dist;
  const double sb = sigma_k / dist.dk;
  const auto half = static_cast<long>(std::ceil(6.0 * sb));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  for (long t = -half; t <= half; ++t) {
    kernel[static_cast<std::size_t>(t + half)] =
        std::exp(-0.5 * static_cast<double>(t * t) / (sb * sb));
  }
  const double ksum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  MomentumDist out = dist;
  const long n = static_cast<long>(dist.size());
  for (long a = 0; a < n; ++a) {
    double s = 0.0;
    for (long t = -half; t <= half; ++t) {
      const long b = a + t;
      if (b < 0 || b >= n) continue;
      s += kernel[static_cast<std::size_t>(t + half)] *
           dist.density[static_cast<std::size_t>(b)];
    }
    out.density[static_cast<std::size_t>(a)] = s / ksum;
  }
  const double total = out.total();
  for (double& v : out.density) v /= total;
  return out;
}

WindowStats localized_window_mean(const std::vector<long>& kicks,
                                  const std::vector<double>& values, long lo,
                                  long hi) {
  if (kicks.size() != values.size()) {
    throw ConfigError("series columns differ in length");
  }
  const double mid = 0.5 * static_cast<double>(lo + hi);
  double s1 = 0.0, s2 = 0.0;
  std::size_t n1 = 0, n2 = 0;
  for (std::size_t t = 0; t < kicks.size(); ++t) {
    if (kicks[t] < lo || kicks[t] > hi) continue;
    if (static_cast<double>(kicks[t]) < mid) {
      s1 += values[t];
      ++n1;
    } else {
      s2 += values[t];
      ++n2;
    }
  }
  if (n1 + n2 < 4 || n1 == 0 || n2 == 0) {
    throw ConfigError("window [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] holds too few points");
  }
  WindowStats w;
  w.points = n1 + n2;
  w.mean = (s1 + s2) / static_cast<double>(w.points);
  const double m1 = s1 / static_cast<double>(n1);
  const double m2 = s2 / static_cast<double>(n2);
  w.drift = w.mean != 0.0 ? (m2 - m1) / w.mean : 0.0;
  return w;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("rank correlation needs two equal-length series");
  }
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < rx.size(); ++t) {
    sxy += (rx[t] - mx) * (ry[t] - my);
    sxx += (rx[t] - mx) * (rx[t] - mx);
    syy += (ry[t] - my) * (ry[t] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace qkr
