#pragma once

#include <Eigen/Dense>
#include <vector>

namespace glmcf::projective {

using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Symplectic quotient of C^{n+1} by the weighted circle action with weights
// a, at moment level c < 0. Geometry is evaluated through lifted
// representatives z in the level set and horizontal projection; no orbifold
// charts are ever constructed.
class WeightedProjective {
 public:
  WeightedProjective(std::vector<long long> a, double c);

  int n() const { return static_cast<int>(a_.size()) - 1; }  // complex dim of quotient
  double level() const { return c_; }
  double einstein_constant() const { return C_; }
  const std::vector<long long>& weights() const { return a_; }
  double weight_sum() const { return sum_a_; }

  // Moment map mu(z) = -1/2 sum a_i |z_i|^2.
  double moment(const CVec& z) const;

  // Canonical representative with |z_i|^2 = rho_i and real nonnegative phases.
  // Throws unless rho > 0 and sum a_i rho_i = -2c.
  CVec lift_orbit_point(const RVec& rho) const;

  // f_a = (1/n){ (sum a / c) |z|^2/4 + log sqrt(sum a_i^2 |z_i|^2) }.
  double canonical_weight(const CVec& z) const;

  // Circle-action generator at z and the moment gradient; both have norm |nu|.
  CVec vertical_field(const CVec& z) const;   // i * (a_j z_j)
  CVec moment_gradient(const CVec& z) const;  // -(a_j z_j)
  double nu_norm(const CVec& z) const;        // sqrt(sum a_j^2 |z_j|^2)

  // Real inner product Re<u, v> on C^{n+1} = R^{2n+2}.
  static double inner(const CVec& u, const CVec& v);

  // Remove the components along the circle generator and the moment gradient.
  CVec horizontal_project(const CVec& z, const CVec& v) const;

  // Quotient metric: g(pi_* u, pi_* v) = inner(u_h, v_h).
  double quotient_metric(const CVec& z, const CVec& u, const CVec& v) const;

 private:
  std::vector<long long> a_;
  RVec ad_;
  double c_;
  double sum_a_;
  double C_;
};

}  // namespace glmcf::projective
