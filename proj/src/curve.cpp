#include "glmcf/curve.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "glmcf/errors.hpp"
#include "glmcf/numerics.hpp"

namespace glmcf::immersion {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Vector2d rot90(const Vector2d& v) { return {-v.y(), v.x()}; }

// Real Jacobian of the chart transition z -> 1/z at the *target* point w:
// the derivative of z(w) = 1/w, used to pull edge gradients back to a node's
// own chart.
Eigen::Matrix2d transition_jacobian_from(const Vector2d& w) {
  std::complex<double> cw(w.x(), w.y());
  std::complex<double> d = -1.0 / (cw * cw);
  Eigen::Matrix2d J;
  J << d.real(), -d.imag(), d.imag(), d.real();
  return J;
}

struct EdgeData {
  double ell = 0.0;
  // d ell / d endpoint, in the edge chart (chart of the left node)
  Vector2d gL = Vector2d::Zero();
  Vector2d gR = Vector2d::Zero();
};

EdgeData edge_geometry(const ConformalModel& model, const ChartPoint& a, const ChartPoint& b,
                       bool with_gradients) {
  ChartPoint bb = model.to_chart(b, a.chart);
  Vector2d delta = bb.xy - a.xy;
  Vector2d mid = a.xy + 0.5 * delta;
  auto sm = model.sample(a.chart, mid);
  double e2u = std::exp(2.0 * sm.u);
  EdgeData e;
  e.ell = std::exp(sm.u) * delta.norm();
  if (e.ell < 1e-10) throw NumericalError("degenerate curve edge");
  if (with_gradients) {
    Vector2d base = e2u / e.ell * delta;
    Vector2d midterm = 0.5 * e.ell * sm.du;
    e.gL = -base + midterm;
    e.gR = base + midterm;
  }
  return e;
}

}  // namespace

void DiscreteCurve::validate() const {
  if (!model) throw ValidationError("curve has no ambient model");
  if (N() < 16) throw ValidationError("curve needs at least 16 nodes");
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < N(); ++i) {
    EdgeData e = edge_geometry(*model, nodes[i], nodes[(i + 1) % N()], false);
    lo = std::min(lo, e.ell);
    hi = std::max(hi, e.ell);
  }
  if (hi > 3.0 * lo) {
    throw ValidationError("curve spacing exceeds factor 3 of uniform; resample first");
  }
}

CurveGeometry compute_geometry(const DiscreteCurve& curve) {
  const ConformalModel& M = *curve.model;
  const int N = curve.N();
  if (N < 16) throw ValidationError("curve needs at least 16 nodes");

  CurveGeometry g;
  g.N = N;
  g.ell.resize(N);
  g.ds.resize(N);
  g.f.resize(N);
  g.T.resize(N);
  g.nu.resize(N);
  g.H.resize(N);
  g.K.resize(N);
  g.gradF.resize(N);
  g.gradFperp.resize(N);
  g.kbar.resize(N);
  g.theta.resize(N);
  g.kappa.resize(N);
  g.kn.resize(N);
  g.Bnorm.resize(N);
  g.gradBnorm.resize(N);

  std::vector<EdgeData> edges(N);
  for (int i = 0; i < N; ++i) {
    edges[i] = edge_geometry(M, curve.nodes[i], curve.nodes[(i + 1) % N], true);
    g.ell[i] = edges[i].ell;
  }
  g.hmax = 0.0;
  g.hmin = 1e300;
  for (int i = 0; i < N; ++i) {
    g.ds[i] = 0.5 * (g.ell[(i + N - 1) % N] + g.ell[i]);
    g.hmax = std::max(g.hmax, g.ds[i]);
    g.hmin = std::min(g.hmin, g.ds[i]);
  }

  std::vector<ConformalModel::Sample> samples(N);
  std::vector<double> expf(N);
  for (int i = 0; i < N; ++i) {
    samples[i] = M.sample(curve.nodes[i].chart, curve.nodes[i].xy);
    g.f[i] = samples[i].f;
    expf[i] = std::exp(g.f[i]);
  }

  // Exact gradient of the discrete weighted volume
  //   Vol_f = sum_edges ell_i * (e^{f_i} + e^{f_{i+1}})/2,
  // accumulated per node in the node's own chart.
  std::vector<Vector2d> grad(N, Vector2d::Zero());
  for (int i = 0; i < N; ++i) {
    int ip = (i + 1) % N;
    double we = 0.5 * (expf[i] + expf[ip]);
    grad[i] += we * edges[i].gL;
    Vector2d gR = edges[i].gR;
    if (curve.nodes[ip].chart != curve.nodes[i].chart) {
      gR = transition_jacobian_from(curve.nodes[ip].xy).transpose() * gR;
    }
    grad[ip] += we * gR;
  }
  for (int i = 0; i < N; ++i) {
    grad[i] += expf[i] * g.ds[i] * samples[i].df;
  }

  long double vol_acc = 0.0L;
  for (int i = 0; i < N; ++i) vol_acc += static_cast<long double>(expf[i]) * g.ds[i];
  g.volF = static_cast<double>(vol_acc);

  g.kL2 = 0.0;
  g.maxB = g.maxGradB = g.maxK = 0.0;

  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    const ChartPoint& p = curve.nodes[i];
    Vector2d xm = M.to_chart(curve.nodes[im], p.chart).xy;
    Vector2d xp = M.to_chart(curve.nodes[ip], p.chart).xy;
    double lm = g.ell[im], lp = g.ell[i];

    // second-order first derivative in arc length on the nonuniform stencil
    double cm = -lp / (lm * (lm + lp));
    double c0 = (lp - lm) / (lm * lp);
    double cp = lm / (lp * (lm + lp));
    Vector2d xprime = cm * xm + c0 * p.xy + cp * xp;

    double eu = std::exp(samples[i].u);
    g.T[i] = xprime / (eu * xprime.norm());  // chart components with unit g-norm
    g.nu[i] = rot90(g.T[i]);

    double e2u = eu * eu;
    g.gradF[i] = samples[i].df / e2u;
    double fperp = e2u * g.gradF[i].dot(g.nu[i]);  // g(grad f, nu)
    g.gradFperp[i] = fperp * g.nu[i];

    double w = expf[i] * g.ds[i];
    Vector2d kraw = -grad[i] / (e2u * w);  // metric-raised gradient
    double kn = e2u * kraw.dot(g.nu[i]);   // g(K_raw, nu)
    g.kn[i] = kn;
    g.K[i] = kn * g.nu[i];
    g.H[i] = g.K[i] + g.gradFperp[i];

    g.kappa[i] = kn + fperp;
    g.Bnorm[i] = std::abs(g.kappa[i]);
    g.maxB = std::max(g.maxB, g.Bnorm[i]);
    g.maxK = std::max(g.maxK, std::abs(kn));
    g.kL2 += kn * kn * w;

    // alpha_K density: JK = kn * J nu = -kn * T, so g(JK, T) = -kn
    g.kbar[i] = -kn;
  }

  // Cumulative angle by the trapezoidal edge rule (second order; a
  // left-endpoint rule leaves a smooth O(h) error field that the angle
  // evolution residual would inherit).
  g.theta[0] = 0.0;
  for (int i = 0; i + 1 < N; ++i) {
    g.theta[i + 1] = g.theta[i] + 0.5 * (g.kbar[i] + g.kbar[i + 1]) * g.ell[i];
  }
  g.thetaWrap = g.theta[N - 1] + 0.5 * (g.kbar[N - 1] + g.kbar[0]) * g.ell[N - 1];

  // Loop integral with the chord-to-arc correction (edge lengths are chords,
  // short of the arc by kappa^2 l^2 / 24); fourth-order on smooth curves.
  long double hol_acc = 0.0L;
  for (int i = 0; i < N; ++i) {
    int ip = (i + 1) % N;
    double kap = 0.5 * (g.kappa[i] + g.kappa[ip]);
    double arc = g.ell[i] * (1.0 + kap * kap * g.ell[i] * g.ell[i] / 24.0);
    hol_acc += 0.5L * (static_cast<long double>(g.kbar[i]) + g.kbar[ip]) * arc;
  }
  g.holonomy = static_cast<double>(hol_acc);

  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    double lm = g.ell[im], lp = g.ell[i];
    double cm = -lp / (lm * (lm + lp));
    double c0 = (lp - lm) / (lm * lp);
    double cp = lm / (lp * (lm + lp));
    g.gradBnorm[i] = std::abs(cm * g.kappa[im] + c0 * g.kappa[i] + cp * g.kappa[ip]);
    g.maxGradB = std::max(g.maxGradB, g.gradBnorm[i]);
  }
  return g;
}

std::vector<Vector2d> stencil_mean_curvature(const DiscreteCurve& curve,
                                             const CurveGeometry& geom) {
  const ConformalModel& M = *curve.model;
  const int N = curve.N();
  std::vector<Vector2d> H(N);
  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    const ChartPoint& p = curve.nodes[i];
    Vector2d xm = M.to_chart(curve.nodes[im], p.chart).xy;
    Vector2d xp = M.to_chart(curve.nodes[ip], p.chart).xy;
    double lm = geom.ell[im], lp = geom.ell[i];

    double cm = -lp / (lm * (lm + lp));
    double c0 = (lp - lm) / (lm * lp);
    double cp = lm / (lp * (lm + lp));
    Vector2d v = cm * xm + c0 * p.xy + cp * xp;

    double dm = 2.0 / (lm * (lm + lp));
    double d0 = -2.0 / (lm * lp);
    double dp = 2.0 / (lp * (lm + lp));
    Vector2d xpp = dm * xm + d0 * p.xy + dp * xp;

    auto s = M.sample(p.chart, p.xy);
    double ux = s.du.x(), uy = s.du.y();
    Vector2d gamma(ux * v.x() * v.x() + 2.0 * uy * v.x() * v.y() - ux * v.y() * v.y(),
                   -uy * v.x() * v.x() + 2.0 * ux * v.x() * v.y() + uy * v.y() * v.y());
    Vector2d full = xpp + gamma;
    double e2u = std::exp(2.0 * s.u);
    double hn = e2u * full.dot(geom.nu[i]);
    H[i] = hn * geom.nu[i];
  }
  return H;
}

double weighted_volume(const CurveGeometry& geom) { return geom.volF; }

double cohomology_integral(const CurveGeometry& geom) { return geom.holonomy; }

spectral::WeightedLaplacian assemble_laplacian(const CurveGeometry& geom) {
  return spectral::assemble(geom.ds, geom.f, geom.ell);
}

HamiltonianField build_hamiltonian_field(const CurveGeometry& geom,
                                         const std::vector<double>& u) {
  const int N = geom.N;
  if (static_cast<int>(u.size()) != N) throw ValidationError("field size mismatch");
  HamiltonianField hf;
  hf.u = u;
  hf.dudS.resize(N);
  hf.V.resize(N);
  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    // plain central difference: sum (du/ds)_i ds_i telescopes to exactly zero
    hf.dudS[i] = (u[ip] - u[im]) / (geom.ell[im] + geom.ell[i]);
    hf.V[i] = -hf.dudS[i] * geom.nu[i];
  }
  return hf;
}

DiscreteCurve displace(const DiscreteCurve& curve, const std::vector<Vector2d>& V, double s) {
  DiscreteCurve out = curve;
  for (int i = 0; i < curve.N(); ++i) out.nodes[i].xy += s * V[i];
  return out;
}

DiscreteCurve resample_uniform(const DiscreteCurve& curve, int N_out) {
  const ConformalModel& M = *curve.model;
  const int N = curve.N();
  std::vector<double> ell(N), cum(N + 1, 0.0);
  for (int i = 0; i < N; ++i) {
    ell[i] = edge_geometry(M, curve.nodes[i], curve.nodes[(i + 1) % N], false).ell;
    cum[i + 1] = cum[i] + ell[i];
  }
  const double L = cum[N];

  DiscreteCurve out;
  out.model = curve.model;
  out.nodes.resize(N_out);
  int seg = 0;
  for (int k = 0; k < N_out; ++k) {
    double target = L * k / N_out;
    while (seg + 1 < N && cum[seg + 1] <= target) ++seg;
    // cubic Lagrange through nodes seg-1..seg+2 in the chart of node seg,
    // chordal arc parameterization
    int im = (seg + N - 1) % N;
    int ip = (seg + 1) % N;
    int ipp = (seg + 2) % N;
    const ChartPoint& base = curve.nodes[seg];
    Vector2d P0 = M.to_chart(curve.nodes[im], base.chart).xy;
    Vector2d P1 = base.xy;
    Vector2d P2 = M.to_chart(curve.nodes[ip], base.chart).xy;
    Vector2d P3 = M.to_chart(curve.nodes[ipp], base.chart).xy;
    double t0 = -ell[im], t1 = 0.0, t2 = ell[seg], t3 = ell[seg] + ell[ip];
    double t = target - cum[seg];

    auto lag = [&](double a, double b, double c, double d) {
      return (t - b) * (t - c) * (t - d) / ((a - b) * (a - c) * (a - d));
    };
    double w0 = lag(t0, t1, t2, t3);
    double w1 = lag(t1, t0, t2, t3);
    double w2 = lag(t2, t0, t1, t3);
    double w3 = lag(t3, t0, t1, t2);
    ChartPoint np{base.chart, w0 * P0 + w1 * P1 + w2 * P2 + w3 * P3};
    int pc = M.preferred_chart(np);
    out.nodes[k] = (pc == np.chart) ? np : M.to_chart(np, pc);
  }
  return out;
}

double first_variation_check(const DiscreteCurve& curve, const HamiltonianField& field,
                             double s0, int levels) {
  CurveGeometry geom = compute_geometry(curve);
  long double target_acc = 0.0L;
  for (int i = 0; i < geom.N; ++i) {
    // K = kn nu, V = -(du/ds) nu, nu of unit g-norm: g(K, V) = -kn du/ds
    target_acc += static_cast<long double>(geom.kn[i]) * field.dudS[i] * geom.weight_measure(i);
  }
  double target = static_cast<double>(target_acc);

  // Displacements stay a fraction of the node spacing; the Richardson ladder
  // in s removes the truncation, leaving summation roundoff.
  double vmax = 0.0;
  for (const auto& v : field.V) vmax = std::max(vmax, v.norm());
  double step = s0 * geom.hmin / std::max(vmax, 1e-12);

  auto fn = [&](double s) {
    return weighted_volume(compute_geometry(displace(curve, field.V, s)));
  };
  double deriv = richardson_derivative(fn, step, levels);

  // Fair comparison scale: Cauchy-Schwarz bound |int g(K,V)| <= |K|_f |V|_f,
  // with an absolute floor for f-minimal curves where everything vanishes.
  double knorm = 0.0, vnorm = 0.0;
  for (int i = 0; i < geom.N; ++i) {
    double w = geom.weight_measure(i);
    knorm += geom.kn[i] * geom.kn[i] * w;
    vnorm += field.dudS[i] * field.dudS[i] * w;
  }
  double scale = std::sqrt(knorm) * std::sqrt(vnorm);
  double denom = std::max({std::abs(target), std::abs(deriv), scale, 1e-4 * geom.volF * vmax});
  return std::abs(deriv - target) / denom;
}

double second_variation_form(const CurveGeometry& geom, const std::vector<double>& u,
                             double C) {
  const int N = geom.N;
  if (static_cast<int>(u.size()) != N) throw ValidationError("trial function size mismatch");
  spectral::WeightedLaplacian op = assemble_laplacian(geom);
  Eigen::VectorXd uv(N);
  for (int i = 0; i < N; ++i) uv(i) = u[i];
  Eigen::VectorXd lap = op.apply(uv);

  double q = 0.0;
  for (int i = 0; i < N; ++i) q += lap(i) * lap(i) * op.wnode[i];
  q -= C * op.dirichlet(uv);

  // K-terms (vanish identically at f-minimal curves): B(grad u, grad u) =
  // (u')^2 H, and both H and K are normal, so g(H,K) = kappa * kn.
  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    double up = (u[ip] - u[im]) / (geom.ell[im] + geom.ell[i]);
    double w = geom.weight_measure(i);
    q -= 2.0 * up * up * geom.kappa[i] * geom.kn[i] * w;
    double jgu = up * geom.kn[i];  // g(J grad u, K) = u' g(nu, K)
    q += jgu * jgu * w;
  }
  return q;
}

double fd_second_variation(const DiscreteCurve& curve, const std::vector<double>& u,
                           Extension extension, double kmax_tol, double s0, int levels) {
  CurveGeometry geom = compute_geometry(curve);
  if (geom.maxK > kmax_tol) {
    throw ValidationError(
        "fd_second_variation: curve is not f-minimal to tolerance; the quadratic form "
        "depends on the extension there");
  }
  HamiltonianField field = build_hamiltonian_field(geom, u);

  double vmax = 0.0;
  for (const auto& v : field.V) vmax = std::max(vmax, v.norm());
  double step = s0 * geom.hmin / std::max(vmax, 1e-12);

  const ConformalModel& M = *curve.model;
  auto shoot = [&](double s) {
    // geodesic exponential per node, RK4 on the geodesic equation
    DiscreteCurve out = curve;
    const int steps = 8;
    for (int i = 0; i < curve.N(); ++i) {
      Vector2d x = curve.nodes[i].xy;
      Vector2d v = s * field.V[i];
      int chart = curve.nodes[i].chart;
      auto acc = [&](const Vector2d& xx, const Vector2d& vv) {
        auto sm = M.sample(chart, xx);
        double ux = sm.du.x(), uy = sm.du.y();
        return Vector2d(
            -(ux * vv.x() * vv.x() + 2.0 * uy * vv.x() * vv.y() - ux * vv.y() * vv.y()),
            -(-uy * vv.x() * vv.x() + 2.0 * ux * vv.x() * vv.y() + uy * vv.y() * vv.y()));
      };
      double h = 1.0 / steps;
      for (int k = 0; k < steps; ++k) {
        Vector2d k1x = v, k1v = acc(x, v);
        Vector2d k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
        Vector2d k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
        Vector2d k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      }
      out.nodes[i].xy = x;
    }
    return out;
  };

  auto fn = [&](double s) {
    DiscreteCurve moved = (extension == Extension::chart_linear) ? displace(curve, field.V, s)
                                                                 : shoot(s);
    return weighted_volume(compute_geometry(moved));
  };
  return richardson_second_derivative(fn, step, levels);
}

HamiltonianField make_essential_perturbation(const CurveGeometry& geom,
                                             const spectral::EigenResult& eigen,
                                             const std::vector<double>& u_raw) {
  const int N = geom.N;
  if (static_cast<int>(u_raw.size()) != N) throw ValidationError("perturbation size mismatch");
  spectral::WeightedLaplacian op = assemble_laplacian(geom);

  Eigen::VectorXd u(N);
  for (int i = 0; i < N; ++i) u(i) = u_raw[i];
  double norm0 = std::sqrt(op.inner(u, u));

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
  u -= op.inner(ones, u) / op.inner(ones, ones) * ones;

  // Orthonormalize the eigenspace basis in <,>_f, then project out.
  std::vector<Eigen::VectorXd> basis;
  for (const auto& e : eigen.eigenspace) {
    Eigen::VectorXd b = e;
    b -= op.inner(ones, b) / op.inner(ones, ones) * ones;
    for (const auto& prev : basis) b -= op.inner(prev, b) * prev;
    double n = std::sqrt(op.inner(b, b));
    if (n > 1e-12) basis.push_back(b / n);
  }
  for (const auto& b : basis) u -= op.inner(b, u) * b;

  double rem = std::sqrt(op.inner(u, u));
  if (rem <= 1e-8 * std::max(norm0, 1e-300)) {
    throw ValidationError(
        "essential perturbation: input lies in the first eigenspace plus constants");
  }
  std::vector<double> uu(N);
  for (int i = 0; i < N; ++i) uu[i] = u(i);
  return build_hamiltonian_field(geom, uu);
}

DiscreteCurve make_chart_circle(const ConformalModel* model, double radius, int N) {
  DiscreteCurve c;
  c.model = model;
  c.nodes.resize(N);
  for (int i = 0; i < N; ++i) {
    double a = kTwoPi * i / N;
    c.nodes[i] = {0, Vector2d(radius * std::cos(a), radius * std::sin(a))};
  }
  return c;
}

DiscreteCurve make_latitude(const ambient::WarpedSphere* model, double theta0, int N) {
  DiscreteCurve c;
  c.model = model;
  c.nodes.resize(N);
  for (int i = 0; i < N; ++i) {
    c.nodes[i] = model->embed(theta0, kTwoPi * i / N);
  }
  return c;
}

DiscreteCurve apply_hamiltonian(const DiscreteCurve& curve, const std::vector<double>& u) {
  CurveGeometry geom = compute_geometry(curve);
  HamiltonianField f = build_hamiltonian_field(geom, u);
  return displace(curve, f.V, 1.0);
}

DiscreteCurve normal_shift(const DiscreteCurve& curve, double delta) {
  CurveGeometry geom = compute_geometry(curve);
  DiscreteCurve out = curve;
  for (int i = 0; i < curve.N(); ++i) out.nodes[i].xy += delta * geom.nu[i];
  return out;
}

DiscreteCurve holonomy_correct(const DiscreteCurve& curve, double tol) {
  // Root on the plain theta wrap (the quantity whose ramp would pollute the
  // gauge-fixed angle field); it agrees with the loop integral to O(h^2)
  // times the alpha_K size.
  auto hol = [](const DiscreteCurve& c) { return compute_geometry(c).thetaWrap; };
  double h0 = hol(curve);
  if (std::abs(h0) <= tol) return curve;
  CurveGeometry geom = compute_geometry(curve);
  double d1 = 1e-4 * geom.hmin;
  DiscreteCurve c0 = curve;
  double x0 = 0.0, f0 = h0;
  double x1 = d1, f1 = hol(normal_shift(curve, d1));
  for (int it = 0; it < 60; ++it) {
    if (std::abs(f1 - f0) < 1e-300) break;
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    DiscreteCurve c2 = normal_shift(curve, x2);
    double f2 = hol(c2);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    if (std::abs(f2) <= tol) return c2;
  }
  return normal_shift(curve, x1);
}

std::vector<double> sample_by_arclength(const CurveGeometry& geom,
                                        const std::function<double(double)>& fn) {
  std::vector<double> u(geom.N);
  double s = 0.0;
  for (int i = 0; i < geom.N; ++i) {
    u[i] = fn(s);
    s += geom.ell[i];
  }
  return u;
}

}  // namespace glmcf::immersion
