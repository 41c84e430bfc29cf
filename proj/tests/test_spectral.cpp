#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glmcf/ambient.hpp"
#include "glmcf/curve.hpp"
#include "glmcf/errors.hpp"
#include "glmcf/lattice.hpp"
#include "glmcf/numerics.hpp"
#include "glmcf/spectral.hpp"

using namespace glmcf;
using namespace glmcf::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

// synthetic flat circle operator: uniform spacing h, circumference N h
WeightedLaplacian flat_circle(int N, double circumference, double fscale = 0.0) {
  double h = circumference / N;
  std::vector<double> ds(N, h), f(N, 0.0), ell(N, h);
  for (int i = 0; i < N; ++i) f[i] = fscale * std::sin(2.0 * kPi * i / N);
  return assemble(ds, f, ell);
}

}  // namespace

TEST_CASE("flat circle spectrum: k^2 / r^2 ladder") {
  double r = 1.7;
  auto op = flat_circle(512, 2.0 * kPi * r);
  auto eig = first_eigenvalue(op);
  double h2 = std::pow(2.0 * kPi * r / 512, 2);
  CHECK(std::abs(eig.lambda1 - 1.0 / (r * r)) < 10.0 * h2);
  CHECK_FALSE(eig.simple);              // double eigenvalue
  CHECK(eig.eigenspace.size() >= 2);    // full eigenspace reported
  CHECK(eig.gap < 1e-6 * eig.lambda1);
  CHECK(eig.residual < 1e-8);
}

TEST_CASE("self-adjointness and sign structure are exact") {
  Rng rng(5);
  auto op = flat_circle(128, 5.0, 0.8);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd u(128), v(128);
    for (int i = 0; i < 128; ++i) {
      u(i) = rng.normal();
      v(i) = rng.normal();
    }
    double a = op.inner(op.apply(u), v);
    double b = op.inner(u, op.apply(v));
    CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + 1.0));
    CHECK(op.inner(op.apply(u), u) <= 1e-12);  // negative semidefinite
    CHECK(op.dirichlet(u) == doctest::Approx(-op.inner(op.apply(u), u)).epsilon(1e-12));
  }
  // constants are annihilated exactly
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(128);
  CHECK(op.apply(ones).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("operator consistency: u'' + f' u' with a smooth weight") {
  // artificial weight, linear in arclength away from the seam
  const int N = 512;
  const double L = 2.0 * kPi;
  const double h = L / N;
  const double a = 0.3;
  std::vector<double> ds(N, h), f(N), ell(N, h);
  for (int i = 0; i < N; ++i) f[i] = a * (i * h);
  auto op = assemble(ds, f, ell);
  Eigen::VectorXd u(N);
  for (int i = 0; i < N; ++i) u(i) = std::sin(i * h);
  Eigen::VectorXd lap = op.apply(u);
  double worst = 0.0;
  for (int i = 8; i < N - 8; ++i) {  // seam-local stencils excluded
    double s = i * h;
    double expected = -std::sin(s) + a * std::cos(s);
    worst = std::max(worst, std::abs(lap(i) - expected));
  }
  CHECK(worst < 10.0 * h * h);
}

TEST_CASE("eigenvalue convergence is second order") {
  double e1 = std::abs(first_eigenvalue(flat_circle(128, 2.0 * kPi)).lambda1 - 1.0);
  double e2 = std::abs(first_eigenvalue(flat_circle(256, 2.0 * kPi)).lambda1 - 1.0);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("great circle: first eigenvalue matches the einstein constant") {
  ambient::RoundSphere sph;
  auto g = immersion::compute_geometry(immersion::make_chart_circle(&sph, 1.0, 512));
  auto eig = first_eigenvalue(immersion::assemble_laplacian(g));
  CHECK(std::abs(eig.lambda1 - 1.0) < 10.0 * g.hmax * g.hmax);
}

TEST_CASE("balance circle in the weighted plane: lambda1 = C/2") {
  double C = 2.0;
  ambient::GaussianPlane plane(C);
  auto g = immersion::compute_geometry(
      immersion::make_chart_circle(&plane, std::sqrt(2.0 / C), 512));
  auto eig = first_eigenvalue(immersion::assemble_laplacian(g));
  CHECK(std::abs(eig.lambda1 - C / 2.0) < 10.0 * g.hmax * g.hmax);
  CHECK(stability_verdict(eig, C) == Verdict::unstable);
}

TEST_CASE("lattice cross-check: explicit circle of the quotient circumference") {
  // n = 1 quotient torus is a circle of circumference |OA_1| = R / sqrt(S)
  for (auto a : std::vector<std::vector<long long>>{{1, 1}, {1, 2}, {1, 3}}) {
    lattice::WeightVector w{a, 1.0};
    lattice::TorusLattice lat = lattice::build_lattice(w);
    double len = std::sqrt(lat.gramA(0, 0));
    auto op = flat_circle(1024, len);
    auto eig = first_eigenvalue(op);
    auto rep = lattice::spectrum_report(w);
    CHECK(std::abs(eig.lambda1 - rep.lambda1) <= 1e-4 * rep.lambda1);
  }
}

TEST_CASE("stability verdict banding") {
  EigenResult e;
  e.lambda1 = 5.0;
  CHECK(stability_verdict(e, 2.0) == Verdict::stable);
  e.lambda1 = 2.0;
  CHECK(stability_verdict(e, 2.0) == Verdict::borderline);
  e.lambda1 = 1.0;
  CHECK(stability_verdict(e, 2.0) == Verdict::unstable);
  CHECK(std::string(to_string(Verdict::stable)) == "stable");
}

TEST_CASE("verdict agrees with the sign of the second variation on trial spaces") {
  // minimum of Q over {phi_1} + random trials is negative iff lambda1 < C - 1e-8
  Rng rng(99);
  auto min_q = [&](const immersion::CurveGeometry& g, const EigenResult& eig, double C) {
    std::vector<double> phi(eig.phi.data(), eig.phi.data() + eig.phi.size());
    double qmin = immersion::second_variation_form(g, phi, C);
    double L = 0.0;
    for (double l : g.ell) L += l;
    for (int t = 0; t < 20; ++t) {
      std::vector<double> am(10), bm(10);
      for (int m = 0; m < 10; ++m) {
        am[m] = rng.normal() / ((m + 1.0) * (m + 1.0));
        bm[m] = rng.normal() / ((m + 1.0) * (m + 1.0));
      }
      std::vector<double> u(g.N);
      double s = 0.0;
      for (int i = 0; i < g.N; ++i) {
        double v = 0.0;
        for (int m = 0; m < 10; ++m) {
          v += am[m] * std::cos((m + 1) * 2.0 * kPi * s / L) +
               bm[m] * std::sin((m + 1) * 2.0 * kPi * s / L);
        }
        u[i] = v;
        s += g.ell[i];
      }
      qmin = std::min(qmin, immersion::second_variation_form(g, u, C));
    }
    return qmin;
  };

  // unstable: balance circle, lambda1 = C/2
  {
    double C = 2.0;
    ambient::GaussianPlane plane(C);
    auto g = immersion::compute_geometry(immersion::make_chart_circle(&plane, 1.0, 256));
    auto eig = first_eigenvalue(immersion::assemble_laplacian(g));
    CHECK(min_q(g, eig, C) < 0.0);
    CHECK(eig.lambda1 < C - 1e-8);
  }
  // stable: the pinched-waist latitude, lambda1 > C
  {
    auto prof = ambient::WarpedProfile::builtin("pinched");
    ambient::WarpedSphere warped(prof);
    double C = warped.einstein_constant();
    auto g = immersion::compute_geometry(immersion::make_latitude(&warped, kPi / 2, 256));
    auto eig = first_eigenvalue(immersion::assemble_laplacian(g));
    CHECK(min_q(g, eig, C) >= 0.0);
    CHECK(eig.lambda1 >= C - 1e-8);
  }
}

TEST_CASE("assembly rejects degenerate input") {
  std::vector<double> ds(32, 0.1), f(32, 0.0), ell(32, 0.1);
  ell[5] = 1e-12;
  CHECK_THROWS_AS(assemble(ds, f, ell), NumericalError);
  std::vector<double> short_f(31, 0.0);
  CHECK_THROWS_AS(assemble(ds, short_f, ell), ValidationError);
}
