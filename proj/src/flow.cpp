#include "glmcf/flow.hpp"

#include <algorithm>
#include <cmath>

#include "glmcf/errors.hpp"
#include "glmcf/numerics.hpp"

namespace glmcf::flow {

using immersion::compute_geometry;
using spectral::EigenResult;

const char* to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::blowup: return "blowup";
    case Status::maxTime: return "maxTime";
    default: return "error";
  }
}

namespace {

std::vector<immersion::Vector2d> velocity(const CurveGeometry& geom) { return geom.K; }

DiscreteCurve advance(const DiscreteCurve& c, const std::vector<immersion::Vector2d>& v,
                      double dt) {
  DiscreteCurve out = c;
  for (int i = 0; i < c.N(); ++i) out.nodes[i].xy += dt * v[i];
  return out;
}

void normalize_charts(DiscreteCurve& c) {
  for (auto& node : c.nodes) {
    int pc = c.model->preferred_chart(node);
    if (pc != node.chart) node = c.model->to_chart(node, pc);
  }
}

// theta closed up by removing the linear wrap-around drift, so the periodic
// operator sees a single-valued field (gauge: theta(0) = 0).
Eigen::VectorXd closed_theta(const CurveGeometry& g) {
  Eigen::VectorXd th(g.N);
  double wrap = g.thetaWrap;
  double s = 0.0;
  double L = 0.0;
  for (int i = 0; i < g.N; ++i) L += g.ds[i];
  for (int i = 0; i < g.N; ++i) {
    th(i) = g.theta[i] - wrap * (s / L);
    s += g.ds[i];
  }
  return th;
}

}  // namespace

DiscreteCurve step_curve(const DiscreteCurve& curve, const CurveGeometry& geom, double dt) {
  if (geom.maxB > 1e6) throw BlowupError("second fundamental form exceeded blowup threshold");
  auto k1 = velocity(geom);
  auto g2 = compute_geometry(advance(curve, k1, 0.5 * dt));
  auto k2 = velocity(g2);
  auto g3 = compute_geometry(advance(curve, k2, 0.5 * dt));
  auto k3 = velocity(g3);
  auto g4 = compute_geometry(advance(curve, k3, dt));
  auto k4 = velocity(g4);
  DiscreteCurve out = curve;
  for (int i = 0; i < curve.N(); ++i) {
    out.nodes[i].xy += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

FlowTrace run_flow(const DiscreteCurve& initial, const FlowConfig& config,
                   DiscreteCurve* final_curve, const SnapshotFn& on_snapshot) {
  FlowTrace trace;
  DiscreteCurve curve = initial;
  normalize_charts(curve);
  const double C = curve.model->einstein_constant();
  const int N0 = curve.N();

  double t = 0.0;
  double initial_kl2 = -1.0;
  std::size_t next_snapshot = 0;
  int step = 0;

  auto eigen_of = [&](const CurveGeometry& g) {
    return spectral::first_eigenvalue(immersion::assemble_laplacian(g));
  };

  try {
    CurveGeometry geom = compute_geometry(curve);
    initial_kl2 = geom.kL2;
    if (on_snapshot && !config.snapshot_times.empty() && config.snapshot_times[0] <= 0.0) {
      on_snapshot(0.0, curve);
      next_snapshot = 1;
    }

    while (true) {
      if (geom.maxK <= config.stop_tol_kmax) {
        trace.status = Status::converged;
        break;
      }
      if (t >= config.max_time) {
        trace.status = Status::maxTime;
        break;
      }
      if (geom.maxB > config.blowup_b) {
        throw BlowupError("second fundamental form exceeded blowup threshold");
      }

      double dt = config.dt_safety * geom.hmin * geom.hmin / (1.0 + geom.maxB * geom.maxB);
      dt = std::min({dt, config.dt_cap, config.max_time - t});
      if (dt < config.dt_min) {
        throw BlowupError("time step collapsed below dt_min");
      }

      bool diagnose = (step % config.diag_every) == 0;
      DiscreteCurve next = step_curve(curve, geom, dt);
      CurveGeometry next_geom = compute_geometry(next);

      if (diagnose) {
        DiagnosticRecord rec;
        rec.t = t;
        rec.vol_f = geom.volF;
        rec.k_l2 = geom.kL2;
        rec.max_b = geom.maxB;
        rec.max_grad_b = geom.maxGradB;
        rec.hol_alpha_k = geom.holonomy;

        EigenResult ea = eigen_of(geom);
        EigenResult eb = eigen_of(next_geom);
        rec.lambda1 = ea.lambda1;
        rec.lambda1_gap = ea.gap;

        rec.vol_identity_err =
            std::abs((next_geom.volF - geom.volF) / dt + geom.kL2) /
            std::max(geom.kL2, 1e-12);

        bool exact = std::abs(geom.holonomy) <= config.exact_tol;
        if (exact) {
          // dL2 slack: bound minus measured derivative of int |K|^2
          double dkl2 = (next_geom.kL2 - geom.kL2) / dt;
          double maxbk = 0.0;
          for (int i = 0; i < geom.N; ++i) {
            maxbk = std::max(maxbk, geom.Bnorm[i] * std::abs(geom.kn[i]));
          }
          rec.dl2_slack = 2.0 * (C + maxbk - ea.lambda1) * geom.kL2 - dkl2;
          rec.dl2_skipped = false;

          // angle evolution: d theta/dt = D_f theta + C theta, gauge fixed,
          // spatial mean removed
          spectral::WeightedLaplacian op = immersion::assemble_laplacian(geom);
          Eigen::VectorXd tha = closed_theta(geom);
          Eigen::VectorXd thb = closed_theta(next_geom);
          Eigen::VectorXd rhs = op.apply(tha) + C * tha;
          Eigen::VectorXd resid = (thb - tha) / dt - rhs;
          double mean = 0.0, wsum = 0.0;
          for (int i = 0; i < geom.N; ++i) {
            mean += resid(i) * op.wnode[i];
            wsum += op.wnode[i];
          }
          mean /= wsum;
          rec.angle_resid = 0.0;
          for (int i = 0; i < geom.N; ++i) {
            rec.angle_resid = std::max(rec.angle_resid, std::abs(resid(i) - mean));
          }
          rec.angle_skipped = false;
        }

        if (ea.simple && eb.simple) {
          // first-eigenvalue evolution identity (equality line), simple case
          spectral::WeightedLaplacian op = immersion::assemble_laplacian(geom);
          const Eigen::VectorXd& phi = ea.phi;
          double dlam = (eb.lambda1 - ea.lambda1) / dt;
          Eigen::VectorXd lap = op.apply(phi);
          double integral = 0.0;
          for (int i = 0; i < geom.N; ++i) {
            int im = (i + geom.N - 1) % geom.N;
            int ipn = (i + 1) % geom.N;
            double dphi = (phi(ipn) - phi(im)) / (geom.ell[im] + geom.ell[i]);
            double k2 = geom.kn[i] * geom.kn[i];
            double term = 2.0 * dphi * dphi * geom.kappa[i] * geom.kn[i] -
                          k2 * (dphi * dphi + phi(i) * lap(i));
            integral += term * op.wnode[i];
          }
          rec.ef_resid = std::abs(dlam - integral);
          rec.ef_skipped = false;
        }
        trace.samples.push_back(rec);
      }

      curve = std::move(next);
      t += dt;
      ++step;

      // snapshots on time crossings
      while (on_snapshot && next_snapshot < config.snapshot_times.size() &&
             t >= config.snapshot_times[next_snapshot]) {
        on_snapshot(t, curve);
        ++next_snapshot;
      }

      // tangential resampling when spacing drifts; the holonomy mode grows at
      // rate C along the flow, so exact runs re-zero it on a cadence
      double ratio = next_geom.hmax / next_geom.hmin;
      bool project = config.exactness_projection && (step % config.projection_every) == 0;
      if (ratio > config.resample_ratio || project) {
        if (ratio > config.resample_ratio) curve = immersion::resample_uniform(curve, N0);
        if (config.exactness_projection) curve = immersion::holonomy_correct(curve, 1e-10);
        normalize_charts(curve);
        geom = compute_geometry(curve);
      } else {
        geom = std::move(next_geom);
      }
    }

    CurveGeometry geom_end = compute_geometry(curve);
    trace.t_end = t;
    trace.final_max_k = geom_end.maxK;
    EigenResult e_end = eigen_of(geom_end);
    trace.lambda1_limit = e_end.lambda1;
    trace.predicted_rate = 2.0 * (e_end.lambda1 - C);
  } catch (const BlowupError& e) {
    trace.status = Status::blowup;
    trace.message = e.what();
    trace.t_end = t;
  } catch (const NumericalError& e) {
    trace.status = Status::blowup;  // edge degeneracy counts as a singularity
    trace.message = e.what();
    trace.t_end = t;
  }

  // Exponential rate of int |K|^2 over the tail: last fraction of the samples
  // that sit below the threshold relative to the initial value.
  if (initial_kl2 > 0.0) {
    std::vector<double> ts, ys;
    for (const auto& r : trace.samples) {
      if (r.k_l2 > 0.0 && r.k_l2 <= config.rate_fit_threshold * initial_kl2) {
        ts.push_back(r.t);
        ys.push_back(std::log(r.k_l2));
      }
    }
    std::size_t want = static_cast<std::size_t>(config.rate_fit_window * ts.size());
    if (want >= 4) {
      std::vector<double> tt(ts.end() - want, ts.end());
      std::vector<double> yy(ys.end() - want, ys.end());
      auto [a, b] = linear_fit(tt, yy);
      (void)a;
      trace.fitted_rate = -b;
      trace.rate_fitted = true;
    }
  }

  if (final_curve) *final_curve = curve;
  return trace;
}

}  // namespace glmcf::flow
