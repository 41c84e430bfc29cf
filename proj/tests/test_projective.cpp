#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "glmcf/errors.hpp"
#include "glmcf/lattice.hpp"
#include "glmcf/numerics.hpp"
#include "glmcf/orbit.hpp"
#include "glmcf/projective.hpp"

using namespace glmcf;
using namespace glmcf::projective;
using glmcf::orbit::TorusOrbit;

namespace {

constexpr double kPi = std::numbers::pi;
const std::complex<double> kI(0.0, 1.0);

// Monotone level of the radius-r Clifford torus.
double monotone_level(const std::vector<long long>& a, double r) {
  double s = 0.0;
  for (long long ai : a) s += static_cast<double>(ai);
  return -r * r / 2.0 * s;
}

}  // namespace

TEST_CASE("moment level and lift") {
  WeightedProjective m({1, 2}, -1.5);
  Eigen::VectorXd rho(2);
  rho << 1.0, 1.0;
  CVec z = m.lift_orbit_point(rho);
  CHECK(std::abs(z(0) - 1.0) < 1e-14);
  CHECK(std::abs(z(1) - 1.0) < 1e-14);
  CHECK(m.moment(z) == doctest::Approx(-1.5).epsilon(1e-12));

  WeightedProjective hopf({1, 1}, -1.0);
  Eigen::VectorXd r2(2);
  r2 << 1.0, 1.0;
  CVec zh = hopf.lift_orbit_point(r2);
  CHECK(std::abs(zh(0) - 1.0) < 1e-14);
  CHECK(std::abs(zh(1) - 1.0) < 1e-14);

  // off-level and boundary points are rejected
  Eigen::VectorXd bad(2);
  bad << 1.0, 1.1;
  CHECK_THROWS_AS(m.lift_orbit_point(bad), ValidationError);
  Eigen::VectorXd neg(2);
  neg << -0.1, 1.55;
  CHECK_THROWS_AS(m.lift_orbit_point(neg), ValidationError);
}

TEST_CASE("canonical weight: frozen value and invariances") {
  WeightedProjective m({1, 2}, -1.5);
  CVec z(2);
  z << 1.0, 1.0;
  CHECK(m.canonical_weight(z) == doctest::Approx(-1.0 + 0.5 * std::log(5.0)).epsilon(1e-14));

  // invariance under the weighted circle action
  for (double th : {0.3, 1.1, 2.9}) {
    CVec zr(2);
    zr << std::exp(kI * th) * z(0), std::exp(kI * 2.0 * th) * z(1);
    CHECK(std::abs(m.canonical_weight(zr) - m.canonical_weight(z)) < 1e-12);
  }

  // Hopf case: constant over the whole level set
  WeightedProjective hopf({1, 1, 1}, -1.5);
  Eigen::VectorXd r1(3), rr(3);
  r1 << 1.0, 1.0, 1.0;
  rr << 0.4, 1.1, 1.5;
  double f1 = hopf.canonical_weight(hopf.lift_orbit_point(r1));
  double f2 = hopf.canonical_weight(hopf.lift_orbit_point(rr));
  CHECK(std::abs(f1 - f2) < 1e-10);
}

TEST_CASE("einstein constant matches the torus identity") {
  // C = -(1/c) sum a = 2/r^2 at the monotone level
  for (double r : {0.5, 1.0, 2.0}) {
    std::vector<long long> a{1, 2, 3};
    WeightedProjective m(a, monotone_level(a, r));
    CHECK(m.einstein_constant() == doctest::Approx(2.0 / (r * r)).epsilon(1e-12));
  }
}

TEST_CASE("quotient metric: vertical directions vanish, bilinearity") {
  WeightedProjective m({1, 2}, -1.5);
  Eigen::VectorXd rho(2);
  rho << 0.7, 1.15;
  CVec z = m.lift_orbit_point(rho);
  CVec xi = m.vertical_field(z);
  CHECK(m.quotient_metric(z, xi, xi) < 1e-20);

  Rng rng(3);
  CVec u(2), v(2);
  for (int i = 0; i < 2; ++i) {
    u(i) = std::complex<double>(rng.normal(), rng.normal());
    v(i) = std::complex<double>(rng.normal(), rng.normal());
  }
  double muv = m.quotient_metric(z, u, v);
  CHECK(m.quotient_metric(z, 2.0 * u, v) == doctest::Approx(2.0 * muv).epsilon(1e-12));
  CHECK(m.quotient_metric(z, v, u) == doctest::Approx(muv).epsilon(1e-12));
}

TEST_CASE("hopf quotient metric matches the Fubini-Study closed form") {
  // reduction of C^{n+1} at |z|^2 = -2c: in the affine chart w_j = z_{j+1}/z_1
  // g(u,v) = rho^2 [ (1+|w|^2) Re<du,dv> - Re(<du,w><w,dv>) ] / (1+|w|^2)^2
  for (int n : {1, 2}) {
    std::vector<long long> a(n + 1, 1);
    WeightedProjective m(a, -1.7);
    double rho2 = 2.0 * 1.7;
    Rng rng(11);
    Eigen::VectorXd rho(n + 1);
    double left = rho2;
    for (int i = 0; i < n; ++i) {
      rho(i) = left * rng.uniform(0.2, 0.5);
      left -= rho(i);
    }
    rho(n) = left;
    CVec z = m.lift_orbit_point(rho);

    for (int trial = 0; trial < 5; ++trial) {
      CVec u(n + 1), v(n + 1);
      for (int i = 0; i <= n; ++i) {
        u(i) = std::complex<double>(rng.normal(), rng.normal());
        v(i) = std::complex<double>(rng.normal(), rng.normal());
      }
      CVec gm = m.moment_gradient(z);
      u -= (WeightedProjective::inner(u, gm) / WeightedProjective::inner(gm, gm)) * gm;
      v -= (WeightedProjective::inner(v, gm) / WeightedProjective::inner(gm, gm)) * gm;

      Eigen::VectorXcd w(n), du(n), dv(n);
      for (int j = 0; j < n; ++j) {
        w(j) = z(j + 1) / z(0);
        du(j) = (u(j + 1) * z(0) - z(j + 1) * u(0)) / (z(0) * z(0));
        dv(j) = (v(j + 1) * z(0) - z(j + 1) * v(0)) / (z(0) * z(0));
      }
      double w2 = w.squaredNorm();
      std::complex<double> duv(0, 0), p1(0, 0), p2(0, 0);
      for (int j = 0; j < n; ++j) {
        duv += du(j) * std::conj(dv(j));
        p1 += du(j) * std::conj(w(j));
        p2 += w(j) * std::conj(dv(j));
      }
      double fs = rho2 * ((1.0 + w2) * duv.real() - (p1 * p2).real()) / ((1.0 + w2) * (1.0 + w2));
      CHECK(m.quotient_metric(z, u, v) == doctest::Approx(fs).epsilon(1e-9));
    }
  }
}

TEST_CASE("orbit at the monotone level is a fixed point") {
  for (auto a : std::vector<std::vector<long long>>{{1, 1}, {1, 2}, {1, 2, 3}}) {
    WeightedProjective m(a, monotone_level(a, 1.0));
    TorusOrbit orb;
    orb.model = &m;
    orb.rho = Eigen::VectorXd::Ones(static_cast<int>(a.size()));
    auto d = orbit::orbit_generalized_mean_curvature(orb);
    CHECK(d.k_norm < 1e-4);
    CHECK(std::abs(d.delta_f_alpha) < 1e-6);
    for (int s = 0; s < d.periods.size(); ++s) CHECK(std::abs(d.periods(s)) < 1e-6);
  }
}

TEST_CASE("interior orbits are Hamiltonian-stationary but not volume-critical") {
  WeightedProjective m({1, 2, 3}, -3.0);
  Rng rng(7);
  int tested = 0;
  while (tested < 50) {
    double x1 = rng.uniform(0.1, 1.5), x2 = rng.uniform(0.1, 1.2);
    double x3 = (6.0 - x1 - 2.0 * x2) / 3.0;
    if (x3 <= 0.05) continue;
    ++tested;
    Eigen::VectorXd rho(3);
    rho << x1, x2, x3;
    TorusOrbit orb;
    orb.model = &m;
    orb.rho = rho;
    auto d = orbit::orbit_generalized_mean_curvature(orb);
    CHECK(std::abs(d.delta_f_alpha) < 1e-6);
  }
}

TEST_CASE("quotient orbit volume matches the projected-lattice closed form") {
  // unweighted quotient volume = (2 pi)^n sqrt det Gram of {P e_j} under
  // <v,w>_rho = sum rho_j v_j w_j, P the projection along the weights
  for (auto a : std::vector<std::vector<long long>>{{1, 1}, {1, 2}, {1, 2, 3}}) {
    const int dim = static_cast<int>(a.size());
    const int n = dim - 1;
    WeightedProjective m(a, monotone_level(a, 1.3));
    Eigen::VectorXd rho = Eigen::VectorXd::Constant(dim, 1.3 * 1.3);
    double logw = orbit::log_weighted_orbit_volume(m, rho);
    double nf = n * m.canonical_weight(m.lift_orbit_point(rho));

    Eigen::VectorXd av(dim);
    for (int i = 0; i < dim; ++i) av(i) = static_cast<double>(a[i]);
    auto ip = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += rho(i) * x(i) * y(i);
      return s;
    };
    Eigen::MatrixXd gram(n, n);
    std::vector<Eigen::VectorXd> basis;
    double aa = ip(av, av);
    for (int j = 1; j < dim; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      e(j) = 1.0;
      basis.push_back(e - ip(e, av) / aa * av);
    }
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) gram(s, t) = ip(basis[s], basis[t]);
    }
    double vol_closed = std::pow(2.0 * kPi, n) * std::sqrt(gram.determinant());
    CHECK(logw - nf == doctest::Approx(std::log(vol_closed)).epsilon(1e-9));
  }
}

TEST_CASE("orbit lambda1 equals the lattice spectrum through the quotient geometry") {
  // n = 1: the quotient orbit is a circle; its first eigenvalue must match
  // the lattice route
  for (auto a : std::vector<std::vector<long long>>{{1, 1}, {1, 2}, {1, 3}}) {
    double r = 1.0;
    WeightedProjective m(a, monotone_level(a, r));
    Eigen::VectorXd rho = Eigen::VectorXd::Constant(2, r * r);
    double len = std::exp(orbit::log_weighted_orbit_volume(m, rho) -
                          1.0 * m.canonical_weight(m.lift_orbit_point(rho)));
    double lam = std::pow(2.0 * kPi / len, 2);
    lattice::SpectrumReport rep = lattice::spectrum_report({a, r});
    CHECK(lam == doctest::Approx(rep.lambda1).epsilon(1e-10));
  }
}

TEST_CASE("orbit flow: fixed points stay, perturbed class integrals grow like e^{Ct}") {
  std::vector<long long> a{1, 2};
  WeightedProjective m(a, monotone_level(a, 1.0));
  TorusOrbit orb;
  orb.model = &m;
  orb.rho = Eigen::VectorXd::Ones(2);

  // fixed point: drift below 1e-6 over unit time
  TorusOrbit cur = orb;
  for (int k = 0; k < 100; ++k) cur = orbit::step_orbit(cur, 0.01);
  CHECK((cur.rho - orb.rho).cwiseAbs().maxCoeff() < 1e-6);

  // perturbed within the level: e^{-Ct} alpha_K periods stay constant
  TorusOrbit pert = orb;
  pert.rho(0) += 0.10;  // a_1 = 1 direction
  pert.rho(1) -= 0.05;  // balance: 1*0.10 = 2*0.05
  auto d0 = orbit::orbit_generalized_mean_curvature(pert);
  double C = m.einstein_constant();
  double t = 0.0, dt = 2e-3;
  TorusOrbit p = pert;
  for (int k = 0; k < 150; ++k) {
    p = orbit::step_orbit(p, dt);
    t += dt;
  }
  auto d1 = orbit::orbit_generalized_mean_curvature(p);
  for (int s = 0; s < d0.periods.size(); ++s) {
    double conserved0 = d0.periods(s);
    double conserved1 = std::exp(-C * t) * d1.periods(s);
    CHECK(conserved1 == doctest::Approx(conserved0).epsilon(1e-4));
  }
  CHECK(std::abs(d1.periods(0)) > std::abs(d0.periods(0)));
}

TEST_CASE("orbit near the polytope boundary errors out") {
  std::vector<long long> a{1, 2};
  WeightedProjective m(a, monotone_level(a, 1.0));
  TorusOrbit orb;
  orb.model = &m;
  orb.rho.resize(2);
  orb.rho << 2.9999994, 0.0000003;  // nearly collapsed coordinate, on the level
  CHECK_THROWS_AS(orbit::orbit_generalized_mean_curvature(orb), NumericalError);
}

TEST_CASE("identity between volume gradient and alpha_K periods") {
  // alpha_K(xi_s) = d log Vol_f along the polytope velocity of J xi_s
  std::vector<long long> a{1, 2, 3};
  WeightedProjective m(a, -3.0);
  Eigen::VectorXd rho(3);
  rho << 0.9, 1.3, (6.0 - 0.9 - 2.6) / 3.0;
  TorusOrbit orb;
  orb.model = &m;
  orb.rho = rho;
  auto d = orbit::orbit_generalized_mean_curvature(orb);

  CVec z = m.lift_orbit_point(rho);
  for (int s = 0; s < 2; ++s) {
    CVec xi = CVec::Zero(3);
    xi(s + 1) = kI * z(s + 1);
    CVec xih = m.horizontal_project(z, xi);
    CVec v = kI * xih;
    Eigen::VectorXd pv(3);
    for (int j = 0; j < 3; ++j) pv(j) = 2.0 * (std::conj(z(j)) * v(j)).real();
    double h = 1e-5;
    double dlog = (orbit::log_weighted_orbit_volume(m, rho + h * pv) -
                   orbit::log_weighted_orbit_volume(m, rho - h * pv)) /
                  (2.0 * h);
    CHECK(d.periods(s) == doctest::Approx(2.0 * kPi * dlog).epsilon(1e-6));
  }
}
