#include <cmath>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "qkr/error.hpp"
#include "qkr/observables.hpp"

namespace qkr {

namespace {

// Two-parameter decay with x = (A, log scale) so the scale stays positive.
struct DecayFunctor : Eigen::DenseFunctor<double> {
  DecayFunctor(DecayModel model, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(z.size())),
        model(model),
        z(z),
        y(y) {}

  double eval(double zz, double a, double s) const {
    const double scale = std::exp(s);
    if (model == DecayModel::kExponential) return a * std::exp(-zz / scale);
    const double u = (zz / scale) * (zz / scale);
    return a / (1.0 + u);
  }

  int operator()(const InputType& x, ValueType& f) const {
    for (long t = 0; t < z.size(); ++t) f[t] = eval(z[t], x[0], x[1]) - y[t];
    return 0;
  }

  int df(const InputType& x, JacobianType& jac) const {
    const double scale = std::exp(x[1]);
    for (long t = 0; t < z.size(); ++t) {
      const double zz = z[t];
      if (model == DecayModel::kExponential) {
        const double e = std::exp(-zz / scale);
        jac(t, 0) = e;
        jac(t, 1) = x[0] * e * zz / scale;
      } else {
        const double u = (zz / scale) * (zz / scale);
        jac(t, 0) = 1.0 / (1.0 + u);
        jac(t, 1) = x[0] * 2.0 * u / ((1.0 + u) * (1.0 + u));
      }
    }
    return 0;
  }

  DecayModel model;
  Eigen::VectorXd z, y;
};

}  // namespace

DecayModel parse_decay_model(const std::string& name) {
  if (name == "exponential") return DecayModel::kExponential;
  if (name == "lorentzian") return DecayModel::kLorentzian;
  if (name == "algebraic") return DecayModel::kAlgebraic;
  throw ConfigError("unknown decay model '" + name + "'");
}

std::string to_string(DecayModel model) {
  switch (model) {
    case DecayModel::kExponential:
      return "exponential";
    case DecayModel::kLorentzian:
      return "lorentzian";
    case DecayModel::kAlgebraic:
      return "algebraic";
  }
  return "unknown";
}

FitResult fit_decay(const CorrFunction& corr, DecayModel model, double z_min,
                    double z_max) {
  std::vector<double> zs, ys;
  for (std::size_t t = 0; t < corr.z_values.size(); ++t) {
    const double zz = corr.z_values[t];
    if (zz < z_min || zz > z_max) continue;
    if (model == DecayModel::kAlgebraic && zz <= 0.0) continue;
    zs.push_back(zz);
    ys.push_back(corr.g1[t]);
  }
  if (zs.size() < 3) {
    throw ConfigError("fit window holds fewer than three samples");
  }
  const Eigen::Map<const Eigen::VectorXd> z(zs.data(),
                                            static_cast<long>(zs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(),
                                            static_cast<long>(ys.size()));
  FitResult r;
  r.model = model;
  r.z_min = z_min;
  r.z_max = z_max;
  r.points = zs.size();

  if (model == DecayModel::kAlgebraic) {
    // Linear in A: A = sum y z^-1/2 / sum z^-1.
    const Eigen::VectorXd basis = z.array().rsqrt();
    r.amplitude = basis.dot(y) / basis.squaredNorm();
    r.param = r.amplitude;
    r.residual_rms = std::sqrt((r.amplitude * basis - y).squaredNorm() /
                               static_cast<double>(zs.size()));
    return r;
  }

  // Start from a log-linear fit of the positive samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (long t = 0; t < z.size(); ++t) {
    if (y[t] <= 0.0) continue;
    const double ly = std::log(y[t]);
    sx += z[t];
    sy += ly;
    sxx += z[t] * z[t];
    sxy += z[t] * ly;
    ++cnt;
  }
  double a0 = y[0] > 0.0 ? y[0] : 1.0;
  double scale0 = 0.5 * (z_max - z_min) + 1e-3;
  if (cnt >= 2) {
    const double den = cnt * sxx - sx * sx;
    const double slope = den != 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
    if (slope < 0.0) {
      scale0 = -1.0 / slope;
      a0 = std::exp((sy - slope * sx) / cnt);
    }
  }

  DecayFunctor functor(model, z, y);
  Eigen::LevenbergMarquardt<DecayFunctor> lm(functor);
  lm.setMaxfev(2000);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  Eigen::VectorXd x(2);
  x << a0, std::log(scale0);
  const auto status = lm.minimize(x);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  if (status == Status::TooManyFunctionEvaluation ||
      status == Status::ImproperInputParameters || !x.allFinite()) {
    Eigen::VectorXd f(z.size());
    functor(x, f);
    throw ConvergenceError(to_string(model) + " fit did not converge",
                           f.norm());
  }
  Eigen::VectorXd f(z.size());
  functor(x, f);
  r.amplitude = x[0];
  r.param = std::exp(x[1]);
  r.residual_rms = std::sqrt(f.squaredNorm() / static_cast<double>(z.size()));
  return r;
}

}  // namespace qkr
