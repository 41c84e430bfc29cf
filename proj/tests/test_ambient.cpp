#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glmcf/ambient.hpp"
#include "glmcf/errors.hpp"
#include "glmcf/numerics.hpp"

using namespace glmcf;
using namespace glmcf::ambient;

namespace {

constexpr double kPi = std::numbers::pi;

// compatibility of (g, J, w) at sampled points: w(X,Y) = g(JX,Y),
// J^2 = -I, g(JX,JY) = g(X,Y)
void check_compatibility(const AmbientModel& m, const ChartPoint& p, Rng& rng) {
  Matrix2d g = m.metric(p);
  Matrix2d J = m.complex_structure(p);
  Matrix2d W = m.symplectic_form(p);
  Matrix2d J2 = J * J + Matrix2d::Identity();
  CHECK(J2.cwiseAbs().maxCoeff() < 1e-10);
  for (int t = 0; t < 4; ++t) {
    Vector2d X(rng.uniform(-1, 1), rng.uniform(-1, 1));
    Vector2d Y(rng.uniform(-1, 1), rng.uniform(-1, 1));
    double w = X.transpose() * W * Y;
    double gJ = (J * X).transpose() * g * Y;
    CHECK(w == doctest::Approx(gJ).epsilon(1e-10));
    double gxy = X.transpose() * g * Y;
    double gJJ = (J * X).transpose() * g * (J * Y);
    CHECK(gJJ == doctest::Approx(gxy).epsilon(1e-10));
  }
}

}  // namespace

TEST_CASE("compatibility invariants hold at random points") {
  Rng rng(42);
  GaussianPlane plane(2.0);
  RoundSphere sphere;
  WarpedSphere warped(WarpedProfile::builtin("pinched"));
  for (int t = 0; t < 1000; ++t) {
    ChartPoint p{0, {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}};
    if (p.xy.norm() < 0.05) continue;
    check_compatibility(plane, p, rng);
    check_compatibility(sphere, p, rng);
    check_compatibility(warped, p, rng);
    ChartPoint p1{1, p.xy};
    check_compatibility(sphere, p1, rng);
    check_compatibility(warped, p1, rng);
  }
}

TEST_CASE("weight residual on the flat plane") {
  GaussianPlane plane(2.0);
  CHECK(weight_residual(plane, {0, {0.3, -0.7}}) < 1e-8);
  CHECK(weight_residual(plane, {0, {1.1, 0.4}}) < 1e-8);
}

TEST_CASE("weight residual on the round sphere") {
  RoundSphere sphere;
  CHECK(weight_residual(sphere, {0, {0.4, 0.2}}) < 1e-8);
  CHECK(weight_residual(sphere, {0, {1.5, -0.3}}) < 1e-8);
  CHECK(weight_residual(sphere, {1, {0.8, 0.1}}) < 1e-8);
}

TEST_CASE("weight residual on the warped sphere") {
  WarpedSphere warped(WarpedProfile::builtin("pinched"));
  ChartPoint p = warped.embed(kPi / 3.0, 0.7);
  CHECK(weight_residual(warped, p) < 1e-5);
  ChartPoint q = warped.embed(1.9, -0.3);
  CHECK(weight_residual(warped, q) < 1e-5);
}

TEST_CASE("weight residual rejects higher complex dimension by contract") {
  // all built-in chart models are complex dimension 1; the guard is exercised
  // through a stub
  struct FakeModel : ConformalModel {
    double einstein_constant() const override { return 1.0; }
    int chart_count() const override { return 1; }
    std::string name() const override { return "fake"; }
    int complex_dim() const override { return 2; }
    Sample sample(int, const Vector2d&) const override { return {}; }
  } fake;
  CHECK_THROWS_AS(weight_residual(fake, {0, {0.0, 0.0}}), ValidationError);
}

TEST_CASE("gauss-bonnet pins the warped einstein constant") {
  for (const char* name : {"round", "pinched"}) {
    WarpedProfile prof = WarpedProfile::builtin(name);
    CHECK(prof.C * prof.area == doctest::Approx(4.0 * kPi).epsilon(1e-6));
  }
}

TEST_CASE("round profile reproduces the analytic sphere") {
  WarpedSphere wr(WarpedProfile::builtin("round"));
  RoundSphere sphere;
  for (double x : {0.3, 0.9, 1.7, 2.8}) {
    ChartPoint p{0, {x, 0.1}};
    auto a = wr.sample(0, p.xy);
    auto b = sphere.sample(0, p.xy);
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-6));
    CHECK(std::abs(a.f) < 1e-12);
    CHECK((a.du - b.du).norm() < 1e-5);
  }
  CHECK(wr.einstein_constant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pinched profile solves the weight equation on the grid") {
  // residual |Delta_g f - (K - C)| small where psi f' = 1 - psi' - C int psi
  WarpedProfile prof = WarpedProfile::builtin("pinched");
  double worst = 0.0;
  for (double th = 0.15; th < kPi - 0.15; th += 0.01) {
    double psi = prof.psi_s.eval(th);
    double dpsi = prof.dpsi_s.eval(th);
    double fp = prof.df_s.eval(th);
    double fp2 = (prof.df_s.eval(th + 1e-5) - prof.df_s.eval(th - 1e-5)) / 2e-5;
    double lap = fp2 + dpsi / psi * fp;
    double k = prof.k_s.eval(th);
    worst = std::max(worst, std::abs(lap - (k - prof.C)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("weighted mean of the warped weight vanishes") {
  WarpedProfile prof = WarpedProfile::builtin("pinched");
  double num = 0.0;
  for (double th = 0.001; th < kPi; th += 0.001) {
    num += prof.f_s.eval(th) * prof.psi_s.eval(th) * 0.001;
  }
  CHECK(std::abs(num) < 1e-5);
}

TEST_CASE("chart transition is an involution and preserves the metric length") {
  RoundSphere sphere;
  WarpedSphere warped(WarpedProfile::builtin("pinched"));
  for (const ConformalModel* m : {static_cast<const ConformalModel*>(&sphere),
                                  static_cast<const ConformalModel*>(&warped)}) {
    ChartPoint p{0, {1.2, -0.4}};
    ChartPoint q = m->to_chart(p, 1);
    ChartPoint back = m->to_chart(q, 0);
    CHECK((back.xy - p.xy).norm() < 1e-12);

    // an infinitesimal segment has the same metric length in both charts
    Vector2d d(1e-6, 2e-6);
    ChartPoint p2{0, p.xy + d};
    ChartPoint q2 = m->to_chart(p2, 1);
    double lp = std::exp(m->sample(0, p.xy).u) * d.norm();
    double lq = std::exp(m->sample(1, q.xy).u) * (q2.xy - q.xy).norm();
    CHECK(lp == doctest::Approx(lq).epsilon(1e-5));
  }
}

TEST_CASE("chart switching policy keeps coordinates bounded") {
  RoundSphere sphere;
  ChartPoint far{0, {5.0, 0.0}};
  int pc = sphere.preferred_chart(far);
  CHECK(pc == 1);
  ChartPoint moved = sphere.to_chart(far, pc);
  CHECK(moved.xy.norm() < 1.0);
  ChartPoint near{0, {0.5, 0.2}};
  CHECK(sphere.preferred_chart(near) == 0);
}

TEST_CASE("warped embed and colatitude round-trip") {
  WarpedSphere warped(WarpedProfile::builtin("pinched"));
  for (double th : {0.6, 1.2, kPi / 2, 2.0, 2.6}) {
    ChartPoint p = warped.embed(th, 0.9);
    CHECK(warped.colatitude(p) == doctest::Approx(th).epsilon(1e-10));
  }
}

TEST_CASE("profile file loading matches the builtin") {
  // write a dense sample of the pinched profile and reload it
  std::string path = "/tmp/glmcf_test_profile.csv";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    for (int j = 0; j <= 2000; ++j) {
      double th = kPi * j / 2000;
      double s = std::sin(th);
      std::fprintf(f, "%.17g,%.17g\n", th, s * (1.0 - 0.2 * s * s));
    }
    std::fclose(f);
  }
  WarpedProfile loaded = WarpedProfile::from_file(path);
  WarpedProfile builtin = WarpedProfile::builtin("pinched");
  CHECK(loaded.C == doctest::Approx(builtin.C).epsilon(1e-6));
  CHECK(loaded.f_s.eval(1.0) == doctest::Approx(builtin.f_s.eval(1.0)).epsilon(1e-4));
}

TEST_CASE("model factory") {
  CHECK(make_model("gaussian_plane", 2.0)->name() == "gaussian_plane");
  CHECK(make_model("round_sphere", 0.0)->name() == "round_sphere");
  CHECK(make_model("warped_sphere", 0.0, "pinched")->name() == "warped_sphere");
  CHECK_THROWS_AS(make_model("nonsense", 1.0), ValidationError);
  CHECK_THROWS_AS(WarpedProfile::builtin("nonsense"), ValidationError);
}
