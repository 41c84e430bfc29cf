#pragma once

#include <functional>
#include <string>
#include <vector>

#include "glmcf/curve.hpp"

namespace glmcf::flow {

using immersion::CurveGeometry;
using immersion::DiscreteCurve;

struct FlowConfig {
  double dt_safety = 0.4;       // sigma in (0, 0.5]: dt <= sigma h^2 / (1 + max|B|^2)
  double dt_cap = 1e300;
  double dt_min = 1e-13;        // parabolic step collapse counts as a singularity
  double max_time = 10.0;
  double stop_tol_kmax = 1e-6;
  int diag_every = 25;          // steps between diagnostic samples
  double resample_ratio = 1.5;  // resample when max ell / min ell exceeds this
  bool exactness_projection = false;  // periodically re-zero the alpha_K holonomy
  int projection_every = 25;          // steps between projections (when enabled)
  double exact_tol = 1e-5;      // |holonomy| below this counts as exact
  double rate_fit_window = 0.3;
  double rate_fit_threshold = 1e-3;  // of the initial int |K|^2
  double blowup_b = 1e6;
  std::vector<double> snapshot_times;
};

enum class Status { converged, blowup, maxTime, error };
const char* to_string(Status s);

// One diagnostic sample; the flags mark checks skipped with a reason.
struct DiagnosticRecord {
  double t = 0.0;
  double vol_f = 0.0;
  double k_l2 = 0.0;
  double lambda1 = 0.0;
  double max_b = 0.0;
  double max_grad_b = 0.0;
  double hol_alpha_k = 0.0;
  double angle_resid = 0.0;
  double dl2_slack = 0.0;
  double ef_resid = 0.0;
  bool angle_skipped = true;
  bool dl2_skipped = true;
  bool ef_skipped = true;
  // extra monitors (not serialized in trace.csv)
  double vol_identity_err = 0.0;  // d/dt Vol_f vs -int |K|^2
  double lambda1_gap = 0.0;
};

struct FlowTrace {
  std::vector<DiagnosticRecord> samples;
  Status status = Status::error;
  std::string message;
  double t_end = 0.0;
  double final_max_k = 0.0;
  double fitted_rate = 0.0;     // exponential decay rate of int |K|^2 (positive)
  double predicted_rate = 0.0;  // 2 (lambda1(limit) - C)
  double lambda1_limit = 0.0;
  bool rate_fitted = false;
};

// One explicit RK4 step in the velocity field K; no resampling, no chart
// normalization (the driver handles both).
DiscreteCurve step_curve(const DiscreteCurve& curve, const CurveGeometry& geom, double dt);

using SnapshotFn = std::function<void(double t, const DiscreteCurve&)>;

// Run the flow until max|K| <= stop tolerance, blowup, or max_time.
// Diagnostics are sampled on matched pre-resample step pairs. Returns the
// trace; final_curve (optional) receives the terminal curve.
FlowTrace run_flow(const DiscreteCurve& initial, const FlowConfig& config,
                   DiscreteCurve* final_curve = nullptr, const SnapshotFn& on_snapshot = {});

}  // namespace glmcf::flow
