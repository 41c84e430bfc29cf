#pragma once

#include <Eigen/Dense>

#include "glmcf/projective.hpp"

namespace glmcf::orbit {

using projective::CVec;
using projective::WeightedProjective;

// A Lagrangian torus orbit in the weighted projective quotient, identified by
// its moment polytope point rho_i = |z_i|^2.
struct TorusOrbit {
  const WeightedProjective* model = nullptr;
  Eigen::VectorXd rho;
  int resolution = 8;  // angle samples per direction for invariance checks

  void validate() const;
};

struct OrbitData {
  Eigen::VectorXd k_polytope;   // d rho / dt representation of K
  double k_norm = 0.0;          // |K| in the quotient metric
  Eigen::VectorXd periods;      // loop integrals of alpha_K over the n cycles
  double delta_f_alpha = 0.0;   // numeric weighted co-differential of alpha_K
  Eigen::MatrixXd gram;         // quotient Gram of the coordinate orbit fields
  double log_weighted_volume = 0.0;
};

// log of the weighted volume of the orbit through rho: the flat torus volume
// divided by the circle-fiber length, weighted by e^{n f_a}.
double log_weighted_orbit_volume(const WeightedProjective& model, const Eigen::VectorXd& rho);

// K of the orbit, its polytope representation, alpha_K periods, and the
// numeric delta_f alpha_K. K comes from central differences of the weighted
// volume through the lift (step 1e-4 * scale); no quotient Christoffels.
OrbitData orbit_generalized_mean_curvature(const TorusOrbit& orbit);

// One RK4 step of d rho / dt = K restricted to the torus-invariant family.
TorusOrbit step_orbit(const TorusOrbit& orbit, double dt);

}  // namespace glmcf::orbit
