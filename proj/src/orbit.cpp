#include "glmcf/orbit.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "glmcf/errors.hpp"

namespace glmcf::orbit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::complex<double> kI(0.0, 1.0);

// Fundamental field of the s-th standard torus coordinate (s = 1..n picks
// complex coordinate s+1; coordinate 1 is redundant modulo the circle action).
CVec coordinate_field(const CVec& z, int s) {
  CVec v = CVec::Zero(z.size());
  v(s) = kI * z(s);
  return v;
}

CVec rotate(const CVec& z, const Eigen::VectorXd& phi) {
  CVec out = z;
  for (int s = 1; s < z.size(); ++s) out(s) *= std::exp(kI * phi(s - 1));
  return out;
}

}  // namespace

void TorusOrbit::validate() const {
  if (!model) throw ValidationError("orbit has no ambient model");
  if (rho.size() != static_cast<int>(model->weights().size())) {
    throw ValidationError("orbit polytope point dimension mismatch");
  }
  double level = 0.0;
  double scale = -2.0 * model->level() / model->weight_sum();
  for (int i = 0; i < rho.size(); ++i) {
    if (rho(i) < 1e-6 * scale) {
      throw NumericalError("orbit too close to the polytope boundary");
    }
    level += static_cast<double>(model->weights()[i]) * rho(i);
  }
  if (std::abs(level + 2.0 * model->level()) > 1e-9 * std::abs(2.0 * model->level())) {
    throw ValidationError("orbit polytope point off the moment level");
  }
}

double log_weighted_orbit_volume(const WeightedProjective& model, const Eigen::VectorXd& rho) {
  CVec z = model.lift_orbit_point(rho);
  double logv = static_cast<double>(model.n()) * model.canonical_weight(z);
  for (int i = 0; i < rho.size(); ++i) logv += std::log(kTwoPi * std::sqrt(rho(i)));
  logv -= std::log(kTwoPi * model.nu_norm(z));
  return logv;
}

OrbitData orbit_generalized_mean_curvature(const TorusOrbit& orbit) {
  orbit.validate();
  const WeightedProjective& M = *orbit.model;
  const int n = M.n();
  const CVec z0 = M.lift_orbit_point(orbit.rho);

  std::vector<CVec> xi_h(n), v(n);
  for (int s = 0; s < n; ++s) {
    xi_h[s] = M.horizontal_project(z0, coordinate_field(z0, s + 1));
    v[s] = kI * xi_h[s];  // invariant normal directions J xi
  }

  Eigen::MatrixXd G(n, n);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) G(s, t) = WeightedProjective::inner(xi_h[s], xi_h[t]);
  }

  // Polytope velocity of each normal direction; these stay on the moment level.
  std::vector<Eigen::VectorXd> pv(n);
  for (int s = 0; s < n; ++s) {
    pv[s].resize(z0.size());
    for (int j = 0; j < z0.size(); ++j) {
      pv[s](j) = 2.0 * (std::conj(z0(j)) * v[s](j)).real();
    }
  }

  // g(K, V_s) = -d log Vol_f in the V_s direction (first variation with
  // constant integrand on the homogeneous orbit).
  const double scale = -2.0 * M.level() / M.weight_sum();
  const double h = 1e-4 * scale;
  Eigen::VectorXd rhs(n);
  for (int s = 0; s < n; ++s) {
    double plus = log_weighted_orbit_volume(M, orbit.rho + h * pv[s]);
    double minus = log_weighted_orbit_volume(M, orbit.rho - h * pv[s]);
    rhs(s) = -(plus - minus) / (2.0 * h);
  }

  Eigen::VectorXd k = G.ldlt().solve(rhs);

  OrbitData out;
  out.gram = G;
  out.log_weighted_volume = log_weighted_orbit_volume(M, orbit.rho);
  out.k_norm = std::sqrt(std::max(0.0, k.dot(G * k)));

  CVec K = CVec::Zero(z0.size());
  for (int s = 0; s < n; ++s) K += k(s) * v[s];
  out.k_polytope.resize(z0.size());
  for (int j = 0; j < z0.size(); ++j) {
    out.k_polytope(j) = 2.0 * (std::conj(z0(j)) * K(j)).real();
  }

  // alpha_K periods over the n fundamental cycles: alpha_K(xi_s) is constant
  // on the orbit and each cycle has parameter length 2 pi.
  out.periods.resize(n);
  CVec JK = kI * K;
  for (int s = 0; s < n; ++s) {
    out.periods(s) = kTwoPi * WeightedProjective::inner(JK, xi_h[s]);
  }

  // Numeric delta_f alpha_K: divergence of e^{nf} alpha^sharp over the orbit
  // angles, central differences. Every ingredient is recomputed at the
  // shifted points; invariance is what makes this vanish.
  auto alpha_frame = [&](const Eigen::VectorXd& phi, int comp) {
    CVec z = rotate(z0, phi);
    std::vector<CVec> xih(n);
    for (int s = 0; s < n; ++s) xih[s] = M.horizontal_project(z, coordinate_field(z, s + 1));
    Eigen::MatrixXd g(n, n);
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) g(s, t) = WeightedProjective::inner(xih[s], xih[t]);
    }
    // K at the shifted point through the same volume-gradient route
    Eigen::VectorXd r(n);
    for (int s = 0; s < n; ++s) {
      CVec vs = kI * xih[s];
      Eigen::VectorXd pvs(z.size());
      Eigen::VectorXd rho(z.size());
      for (int j = 0; j < z.size(); ++j) {
        pvs(j) = 2.0 * (std::conj(z(j)) * vs(j)).real();
        rho(j) = std::norm(z(j));
      }
      double plus = log_weighted_orbit_volume(M, rho + h * pvs);
      double minus = log_weighted_orbit_volume(M, rho - h * pvs);
      r(s) = -(plus - minus) / (2.0 * h);
    }
    Eigen::VectorXd kk = g.ldlt().solve(r);
    CVec Kp = CVec::Zero(z.size());
    for (int s = 0; s < n; ++s) Kp += kk(s) * (kI * xih[s]);
    Eigen::VectorXd alpha(n);
    CVec jk = kI * Kp;
    for (int s = 0; s < n; ++s) alpha(s) = WeightedProjective::inner(jk, xih[s]);
    double nf = static_cast<double>(n) * M.canonical_weight(z);
    double sqrtg = std::sqrt(g.determinant());
    Eigen::VectorXd sharp = g.ldlt().solve(alpha);  // frame components of alpha^sharp
    return std::exp(nf) * sqrtg * sharp(comp);
  };

  const double ha = 1e-3;
  double div = 0.0;
  for (int s = 0; s < n; ++s) {
    Eigen::VectorXd ep = Eigen::VectorXd::Zero(n), em = Eigen::VectorXd::Zero(n);
    ep(s) = ha;
    em(s) = -ha;
    div += (alpha_frame(ep, s) - alpha_frame(em, s)) / (2.0 * ha);
  }
  double nf0 = static_cast<double>(n) * M.canonical_weight(z0);
  out.delta_f_alpha = -std::exp(-nf0) / std::sqrt(G.determinant()) * div;
  return out;
}

TorusOrbit step_orbit(const TorusOrbit& orbit, double dt) {
  orbit.validate();
  auto vel = [&](const Eigen::VectorXd& rho) {
    TorusOrbit o{orbit.model, rho, orbit.resolution};
    return orbit_generalized_mean_curvature(o).k_polytope;
  };
  const Eigen::VectorXd& r0 = orbit.rho;
  Eigen::VectorXd k1 = vel(r0);
  Eigen::VectorXd k2 = vel(r0 + 0.5 * dt * k1);
  Eigen::VectorXd k3 = vel(r0 + 0.5 * dt * k2);
  Eigen::VectorXd k4 = vel(r0 + dt * k3);
  TorusOrbit next = orbit;
  next.rho = r0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next.validate();  // throws when the boundary is reached
  return next;
}

}  // namespace glmcf::orbit
