#include "glmcf/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "glmcf/errors.hpp"

namespace glmcf::ambient {

namespace {

constexpr double kPi = std::numbers::pi;

// Charts hand over at |z| = tan(5 pi / 12), i.e. pi/3 past the equator.
const double kChartSwitchAbs = std::tan(5.0 * kPi / 12.0);

Matrix2d rot90() {
  Matrix2d J;
  J << 0.0, -1.0, 1.0, 0.0;
  return J;
}

}  // namespace

Matrix2d ConformalModel::metric(const ChartPoint& p) const {
  double e2u = std::exp(2.0 * sample(p.chart, p.xy).u);
  return e2u * Matrix2d::Identity();
}

Matrix2d ConformalModel::complex_structure(const ChartPoint&) const { return rot90(); }

Matrix2d ConformalModel::symplectic_form(const ChartPoint& p) const {
  // w(X,Y) = g(JX,Y) = e^{2u} (X1 Y2 - X2 Y1)
  double e2u = std::exp(2.0 * sample(p.chart, p.xy).u);
  Matrix2d W;
  W << 0.0, e2u, -e2u, 0.0;
  return W;
}

double ConformalModel::weight(const ChartPoint& p) const { return sample(p.chart, p.xy).f; }

Vector2d ConformalModel::weight_gradient(const ChartPoint& p) const {
  Sample s = sample(p.chart, p.xy);
  return std::exp(-2.0 * s.u) * s.df;
}

Christoffel ConformalModel::christoffel(const ChartPoint& p) const {
  Sample s = sample(p.chart, p.xy);
  const double ux = s.du.x(), uy = s.du.y();
  Christoffel c;
  c.gamma[0] << ux, uy, uy, -ux;
  c.gamma[1] << -uy, ux, ux, uy;
  return c;
}

ChartPoint ConformalModel::to_chart(const ChartPoint& p, int chart) const {
  if (chart == p.chart) return p;
  if (chart_count() < 2 || chart < 0 || chart > 1) {
    throw ValidationError("chart index out of range");
  }
  double r2 = p.xy.squaredNorm();
  if (r2 <= 0.0) throw NumericalError("chart transition at the opposite pole");
  // w = 1/z (holomorphic), both ways.
  return {chart, Vector2d(p.xy.x() / r2, -p.xy.y() / r2)};
}

int ConformalModel::preferred_chart(const ChartPoint& p) const {
  if (chart_count() < 2) return p.chart;
  if (p.xy.norm() > kChartSwitchAbs) return 1 - p.chart;
  return p.chart;
}

ConformalModel::Sample GaussianPlane::sample(int, const Vector2d& z) const {
  Sample s;
  s.u = 0.0;
  s.du.setZero();
  s.f = -C_ * z.squaredNorm() / 4.0;
  s.df = -C_ / 2.0 * z;
  return s;
}

ConformalModel::Sample RoundSphere::sample(int, const Vector2d& z) const {
  Sample s;
  double r2 = z.squaredNorm();
  s.u = std::log(2.0) - std::log1p(r2);
  s.du = -2.0 / (1.0 + r2) * z;
  s.f = 0.0;
  s.df.setZero();
  return s;
}

// --- warped sphere profile ---------------------------------------------

namespace {

struct ProfileFunctions {
  std::function<double(double)> psi, dpsi, ddpsi;
};

WarpedProfile build_profile(const ProfileFunctions& fn, int grid) {
  if (grid < 33) throw ValidationError("profile grid too coarse");
  if (grid % 2 == 0) ++grid;  // cumulative end-corrections want symmetric grids
  WarpedProfile p;
  const int M = grid;
  const double h = kPi / (M - 1);
  p.theta.resize(M);
  p.psi.resize(M);
  p.dpsi.resize(M);
  p.kgauss.resize(M);

  for (int j = 0; j < M; ++j) {
    double th = j * h;
    p.theta[j] = th;
    p.psi[j] = fn.psi(th);
    p.dpsi[j] = fn.dpsi(th);
  }
  if (std::abs(p.psi[0]) > 1e-12 || std::abs(p.psi[M - 1]) > 1e-12 ||
      std::abs(p.dpsi[0] - 1.0) > 1e-9 || std::abs(p.dpsi[M - 1] + 1.0) > 1e-9) {
    throw ValidationError("profile must satisfy psi(0)=psi(pi)=0, psi'(0)=-psi'(pi)=1");
  }
  for (int j = 1; j + 1 < M; ++j) {
    if (p.psi[j] <= 0.0) throw ValidationError("profile psi must be positive on (0, pi)");
    p.kgauss[j] = -fn.ddpsi(p.theta[j]) / p.psi[j];
  }
  // pole values by quadratic extrapolation (K is even around the poles)
  p.kgauss[0] = 3.0 * p.kgauss[1] - 3.0 * p.kgauss[2] + p.kgauss[3];
  p.kgauss[M - 1] = 3.0 * p.kgauss[M - 2] - 3.0 * p.kgauss[M - 3] + p.kgauss[M - 4];

  // Cumulative integral of psi with Euler-Maclaurin end correction.
  std::vector<double> cumpsi(M, 0.0);
  for (int j = 1; j < M; ++j) {
    cumpsi[j] = cumpsi[j - 1] + 0.5 * h * (p.psi[j - 1] + p.psi[j]);
  }
  for (int j = 1; j < M; ++j) cumpsi[j] -= h * h / 12.0 * (p.dpsi[j] - p.dpsi[0]);

  p.area = 2.0 * kPi * cumpsi[M - 1];
  p.C = 4.0 * kPi / p.area;

  // (psi f')' = psi (K - C)  =>  psi f' = 1 - psi' - C * cumpsi =: G
  std::vector<double> fprime(M, 0.0);
  for (int j = 1; j + 1 < M; ++j) {
    fprime[j] = (1.0 - p.dpsi[j] - p.C * cumpsi[j]) / p.psi[j];
  }
  fprime[0] = 0.0;
  fprime[M - 1] = 0.0;

  std::vector<double> f(M, 0.0);
  for (int j = 1; j < M; ++j) {
    f[j] = f[j - 1] + 0.5 * h * (fprime[j - 1] + fprime[j]);
  }
  // zero weighted mean: integral f psi dtheta = 0
  double num = 0.0, den = 0.0;
  for (int j = 1; j < M; ++j) {
    num += 0.5 * h * (f[j - 1] * p.psi[j - 1] + f[j] * p.psi[j]);
    den += 0.5 * h * (p.psi[j - 1] + p.psi[j]);
  }
  double mean = num / den;
  for (double& v : f) v -= mean;

  p.psi_s.build(p.theta, p.psi, true, 1.0, -1.0);
  p.dpsi_s.build(p.theta, p.dpsi);
  p.k_s.build(p.theta, p.kgauss);
  p.f_s.build(p.theta, f, true, 0.0, 0.0);
  p.df_s.build(p.theta, fprime);

  // Isothermal coordinate sigma(theta) = int_{pi/2} dtheta / psi on a band
  // clipped away from the poles; charts switch long before the band ends.
  p.theta_lo = 0.06;
  p.theta_hi = kPi - 0.06;
  std::vector<double> thb, sig;
  int j_mid = (M - 1) / 2;
  // integrate outward from the equator index for symmetry of roundoff
  std::vector<double> sig_all(M, 0.0);
  for (int j = j_mid + 1; j + 1 < M; ++j) {
    sig_all[j] = sig_all[j - 1] + 0.5 * h * (1.0 / p.psi[j - 1] + 1.0 / p.psi[j]);
  }
  for (int j = j_mid - 1; j >= 1; --j) {
    sig_all[j] = sig_all[j + 1] - 0.5 * h * (1.0 / p.psi[j] + 1.0 / p.psi[j + 1]);
  }
  for (int j = 0; j < M; ++j) {
    if (p.theta[j] >= p.theta_lo && p.theta[j] <= p.theta_hi) {
      thb.push_back(p.theta[j]);
      sig.push_back(sig_all[j]);
    }
  }
  p.sigma_min = sig.front();
  p.sigma_max = sig.back();
  p.sigma_s.build(thb, sig);
  p.theta_of_sigma_s.build(sig, thb);
  return p;
}

}  // namespace

WarpedProfile WarpedProfile::builtin(const std::string& name, int grid) {
  ProfileFunctions fn;
  if (name == "round") {
    fn.psi = [](double t) { return std::sin(t); };
    fn.dpsi = [](double t) { return std::cos(t); };
    fn.ddpsi = [](double t) { return -std::sin(t); };
  } else if (name == "pinched") {
    // psi = sin(t) (1 - b sin^2 t): a waist at the equator whose circle is
    // short enough that lambda_1 = 1/psi(pi/2)^2 clears C.
    const double b = 0.2;
    fn.psi = [b](double t) {
      double s = std::sin(t);
      return s * (1.0 - b * s * s);
    };
    fn.dpsi = [b](double t) {
      double s = std::sin(t), c = std::cos(t);
      return c * (1.0 - 3.0 * b * s * s);
    };
    fn.ddpsi = [b](double t) {
      double s = std::sin(t), c = std::cos(t);
      return -s * (1.0 - 3.0 * b * s * s) - 6.0 * b * s * c * c;
    };
  } else {
    throw ValidationError("unknown built-in profile: " + name);
  }
  return build_profile(fn, grid);
}

WarpedProfile WarpedProfile::from_callable(const std::function<double(double)>& psi_fn, int grid) {
  ProfileFunctions fn;
  fn.psi = psi_fn;
  const double h = 1e-5;
  fn.dpsi = [psi_fn, h](double t) {
    double lo = std::max(0.0, t - h);
    double hi = std::min(kPi, t + h);
    return (psi_fn(hi) - psi_fn(lo)) / (hi - lo);
  };
  fn.ddpsi = [psi_fn, h](double t) {
    double tm = std::max(h, std::min(kPi - h, t));
    return (psi_fn(tm + h) - 2.0 * psi_fn(tm) + psi_fn(tm - h)) / (h * h);
  };
  return build_profile(fn, grid);
}

WarpedProfile WarpedProfile::from_file(const std::string& path, int grid) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile file: " + path);
  std::vector<double> th, ps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      th.push_back(a);
      ps.push_back(b);
    }
  }
  if (th.size() < 8) throw ValidationError("profile file needs at least 8 samples");
  CubicSpline sp;
  sp.build(th, ps, true, 1.0, -1.0);
  return from_callable([sp](double t) { return sp.eval(t); }, grid);
}

ConformalModel::Sample WarpedSphere::sample(int chart, const Vector2d& z) const {
  double r = z.norm();
  if (r <= 0.0) throw NumericalError("warped chart sample at the pole");
  double sgn = (chart == 0) ? 1.0 : -1.0;
  double sigma = sgn * std::log(r);
  if (sigma < prof_.sigma_min || sigma > prof_.sigma_max) {
    throw NumericalError("point outside the warped-sphere chart band");
  }
  double theta = prof_.theta_of_sigma_s.eval(sigma);
  // Newton polish: sigma(theta) is tabulated densely, d sigma / d theta = 1/psi.
  for (int it = 0; it < 3; ++it) {
    double err = prof_.sigma_s.eval(theta) - sigma;
    theta -= err * prof_.psi_s.eval(theta);
    theta = std::clamp(theta, prof_.theta_lo, prof_.theta_hi);
  }
  double psi = prof_.psi_s.eval(theta);
  double dpsi = prof_.dpsi_s.eval(theta);

  Sample s;
  s.u = std::log(psi) - std::log(r);
  s.du = (sgn * dpsi - 1.0) / (r * r) * z;
  s.f = prof_.f_s.eval(theta);
  s.df = sgn * prof_.df_s.eval(theta) * psi / (r * r) * z;
  return s;
}

double WarpedSphere::colatitude(const ChartPoint& p) const {
  double sgn = (p.chart == 0) ? 1.0 : -1.0;
  double sigma = sgn * std::log(p.xy.norm());
  double theta = prof_.theta_of_sigma_s.eval(sigma);
  for (int it = 0; it < 3; ++it) {
    double err = prof_.sigma_s.eval(theta) - sigma;
    theta -= err * prof_.psi_s.eval(theta);
  }
  return theta;
}

ChartPoint WarpedSphere::embed(double theta, double phi) const {
  if (theta < prof_.theta_lo || theta > prof_.theta_hi) {
    throw ValidationError("embed: colatitude outside the chart band");
  }
  double sigma = prof_.sigma_s.eval(theta);
  double r = std::exp(sigma);
  ChartPoint p{0, Vector2d(r * std::cos(phi), r * std::sin(phi))};
  int pc = preferred_chart(p);
  return (pc == p.chart) ? p : to_chart(p, pc);
}

// --- residual check -----------------------------------------------------

double weight_residual(const AmbientModel& model, const ChartPoint& p) {
  if (model.complex_dim() != 1) {
    throw ValidationError("weight residual is computed only for complex dimension 1");
  }
  // u = 0.5 log g11 (charts are conformal); flat 5-point Laplacians of u and
  // f, one Richardson level.
  auto u_at = [&](const Vector2d& z) {
    Matrix2d g = model.metric({p.chart, z});
    return 0.5 * std::log(g(0, 0));
  };
  auto f_at = [&](const Vector2d& z) { return model.weight({p.chart, z}); };

  auto lap = [&](const std::function<double(const Vector2d&)>& fn, double h) {
    const Vector2d& z = p.xy;
    return (fn(z + Vector2d(h, 0)) + fn(z - Vector2d(h, 0)) + fn(z + Vector2d(0, h)) +
            fn(z - Vector2d(0, h)) - 4.0 * fn(z)) /
           (h * h);
  };
  const double h = 1e-3 * (1.0 + p.xy.norm());
  auto lap_ext = [&](const std::function<double(const Vector2d&)>& fn) {
    double c = lap(fn, h);
    double f2 = lap(fn, h / 2.0);
    return (4.0 * f2 - c) / 3.0;
  };

  double e2u = std::exp(2.0 * u_at(p.xy));
  double kgauss = -lap_ext(u_at) / e2u;
  double lapf = lap_ext(f_at) / e2u;
  return std::abs(kgauss - model.einstein_constant() - lapf);
}

std::shared_ptr<AmbientModel> make_model(const std::string& name, double C,
                                         const std::string& profile,
                                         const std::string& profile_file) {
  if (name == "gaussian_plane" || name == "plane") {
    return std::make_shared<GaussianPlane>(C);
  }
  if (name == "round_sphere" || name == "sphere") {
    return std::make_shared<RoundSphere>();
  }
  if (name == "warped_sphere" || name == "warped") {
    if (!profile_file.empty()) {
      return std::make_shared<WarpedSphere>(WarpedProfile::from_file(profile_file));
    }
    return std::make_shared<WarpedSphere>(WarpedProfile::builtin(profile.empty() ? "pinched" : profile));
  }
  throw ValidationError("unknown model: " + name);
}

}  // namespace glmcf::ambient
