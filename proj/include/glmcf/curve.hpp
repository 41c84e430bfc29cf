#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "glmcf/ambient.hpp"
#include "glmcf/spectral.hpp"

namespace glmcf::immersion {

using ambient::ChartPoint;
using ambient::ConformalModel;
using Eigen::Vector2d;

// Closed discretized Lagrangian curve in a real-2-dimensional ambient model
// (every curve there is Lagrangian). Nodes are ordered and periodic.
struct DiscreteCurve {
  const ConformalModel* model = nullptr;
  std::vector<ChartPoint> nodes;

  int N() const { return static_cast<int>(nodes.size()); }
  void validate() const;  // N >= 16, spacing within factor 3 of uniform
};

// Per-node induced geometry. Chart vectors live in the node's own chart.
// K is the exact negative L2(dmu_f)-gradient of the discrete weighted volume
// (normal-projected), so the discrete first-variation identity is exact;
// it is a second-order discretization of H - (grad f)^perp.
struct CurveGeometry {
  int N = 0;
  std::vector<double> ell;    // edge i -> i+1 metric length
  std::vector<double> ds;     // (ell_{i-1} + ell_i)/2
  std::vector<double> f;      // weight at node
  std::vector<Vector2d> T;    // unit tangent (g-norm 1)
  std::vector<Vector2d> nu;   // J T
  std::vector<Vector2d> H;    // curvature vector = K + (grad f)^perp
  std::vector<Vector2d> K;    // generalized mean curvature, normal
  std::vector<Vector2d> gradF;       // metric gradient of f
  std::vector<Vector2d> gradFperp;   // normal part
  std::vector<double> kbar;   // alpha_K density g(JK, T)
  std::vector<double> theta;  // cumulative integral of kbar ds from node 0
  std::vector<double> kappa;  // signed curvature g(H, nu)
  std::vector<double> kn;     // g(K, nu) = -kbar
  std::vector<double> Bnorm;      // |B| = |kappa|
  std::vector<double> gradBnorm;  // |d kappa / ds|

  double volF = 0.0;      // sum e^{f} ds
  double holonomy = 0.0;  // loop integral of alpha_K (chord-to-arc corrected)
  double thetaWrap = 0.0; // plain trapezoid wrap of theta around the loop
  double kL2 = 0.0;       // int |K|^2 dmu_f
  double maxB = 0.0, maxGradB = 0.0, maxK = 0.0;
  double hmax = 0.0, hmin = 0.0;

  double weight_measure(int i) const { return std::exp(f[i]) * ds[i]; }
};

CurveGeometry compute_geometry(const DiscreteCurve& curve);

// Stencil covariant second derivative of position along arc length
// (normal-projected); cross-checks the variational H above at O(h^2).
std::vector<Vector2d> stencil_mean_curvature(const DiscreteCurve& curve,
                                             const CurveGeometry& geom);

double weighted_volume(const CurveGeometry& geom);
double cohomology_integral(const CurveGeometry& geom);

spectral::WeightedLaplacian assemble_laplacian(const CurveGeometry& geom);

// Hamiltonian deformation field: alpha_V = du, i.e. V = -(du/ds) nu. The
// plain central difference makes the discrete loop integral of alpha_V
// vanish identically.
struct HamiltonianField {
  std::vector<double> u;
  std::vector<double> dudS;
  std::vector<Vector2d> V;
};

HamiltonianField build_hamiltonian_field(const CurveGeometry& geom,
                                         const std::vector<double>& u);

DiscreteCurve displace(const DiscreteCurve& curve, const std::vector<Vector2d>& V, double s);

// Resample to N_out nodes at uniform arc length (local cubic interpolation,
// node 0 anchored). Tangential only: the geometric image is preserved to
// O(h^4).
DiscreteCurve resample_uniform(const DiscreteCurve& curve, int N_out);

// Richardson-extrapolated finite-difference d/ds Vol_f against
// -int g(K,V) dmu_f; returns the relative discrepancy.
double first_variation_check(const DiscreteCurve& curve, const HamiltonianField& field,
                             double s0 = 0.25, int levels = 4);

// Hamiltonian second variation quadratic form
//   Q(u) = int { (D_f u)^2 - C |grad u|^2 - 2 g(B(grad u, grad u), K)
//               + g(J grad u, K)^2 } dmu_f
// with the Dirichlet term discretized consistently with D_f (rho_f = C omega
// on all built-in models).
double second_variation_form(const CurveGeometry& geom, const std::vector<double>& u,
                             double C);

enum class Extension { chart_linear, normal_exponential };

// FD second derivative of Vol_f along the extension of the Hamiltonian field
// of u. Requires the curve to be f-minimal to tolerance (the extension-
// dependent terms are K-multiplied).
double fd_second_variation(const DiscreteCurve& curve, const std::vector<double>& u,
                           Extension extension, double kmax_tol = 1e-4, double s0 = 1e-2,
                           int levels = 4);

// Remove mean and first-eigenspace components of u in the weighted inner
// product; errors when nothing essential remains.
HamiltonianField make_essential_perturbation(const CurveGeometry& geom,
                                             const spectral::EigenResult& eigen,
                                             const std::vector<double>& u_raw);

// --- curve constructors and gauges --------------------------------------

// Chart-0 circle of given chart radius about the origin.
DiscreteCurve make_chart_circle(const ConformalModel* model, double radius, int N);

// Latitude circle theta = theta0 on a warped sphere.
DiscreteCurve make_latitude(const ambient::WarpedSphere* model, double theta0, int N);

// Displace nodes by the Hamiltonian field of u (one linearized step).
DiscreteCurve apply_hamiltonian(const DiscreteCurve& curve, const std::vector<double>& u);

DiscreteCurve normal_shift(const DiscreteCurve& curve, double delta);

// Uniform normal shift chosen so the discrete loop integral of alpha_K
// vanishes (secant iteration).
DiscreteCurve holonomy_correct(const DiscreteCurve& curve, double tol = 1e-10);

// Arc-length samples of a callable, u_i = fn(s_i).
std::vector<double> sample_by_arclength(const CurveGeometry& geom,
                                        const std::function<double(double)>& fn);

}  // namespace glmcf::immersion
