#include "glmcf/projective.hpp"

#include <cmath>
#include <complex>

#include "glmcf/errors.hpp"

namespace glmcf::projective {

WeightedProjective::WeightedProjective(std::vector<long long> a, double c)
    : a_(std::move(a)), c_(c) {
  if (a_.size() < 2) throw ValidationError("weighted projective space needs n >= 1");
  for (long long ai : a_) {
    if (ai < 1) throw ValidationError("weights must be positive integers");
  }
  if (!(c_ < 0.0)) throw ValidationError("moment level c must be negative");
  ad_.resize(static_cast<int>(a_.size()));
  sum_a_ = 0.0;
  for (int i = 0; i < ad_.size(); ++i) {
    ad_(i) = static_cast<double>(a_[i]);
    sum_a_ += ad_(i);
  }
  C_ = -sum_a_ / c_;
}

double WeightedProjective::moment(const CVec& z) const {
  double s = 0.0;
  for (int i = 0; i < z.size(); ++i) s += ad_(i) * std::norm(z(i));
  return -0.5 * s;
}

CVec WeightedProjective::lift_orbit_point(const RVec& rho) const {
  if (rho.size() != ad_.size()) throw ValidationError("polytope point dimension mismatch");
  double level = 0.0;
  for (int i = 0; i < rho.size(); ++i) {
    if (!(rho(i) > 0.0)) throw ValidationError("polytope point must have all rho_i > 0");
    level += ad_(i) * rho(i);
  }
  if (std::abs(level + 2.0 * c_) > 1e-10 * std::abs(2.0 * c_)) {
    throw ValidationError("polytope point is not on the moment level: sum a_i rho_i != -2c");
  }
  CVec z(rho.size());
  for (int i = 0; i < rho.size(); ++i) z(i) = std::sqrt(rho(i));
  return z;
}

double WeightedProjective::canonical_weight(const CVec& z) const {
  double F = 0.25 * z.squaredNorm();
  double nu2 = 0.0;
  for (int i = 0; i < z.size(); ++i) nu2 += ad_(i) * ad_(i) * std::norm(z(i));
  if (!(nu2 > 0.0)) throw NumericalError("canonical weight: |nu|^2 <= 0");
  return ((sum_a_ / c_) * F + 0.5 * std::log(nu2)) / static_cast<double>(n());
}

CVec WeightedProjective::vertical_field(const CVec& z) const {
  CVec v(z.size());
  const std::complex<double> I(0.0, 1.0);
  for (int i = 0; i < z.size(); ++i) v(i) = I * ad_(i) * z(i);
  return v;
}

CVec WeightedProjective::moment_gradient(const CVec& z) const {
  CVec v(z.size());
  for (int i = 0; i < z.size(); ++i) v(i) = -ad_(i) * z(i);
  return v;
}

double WeightedProjective::nu_norm(const CVec& z) const {
  double nu2 = 0.0;
  for (int i = 0; i < z.size(); ++i) nu2 += ad_(i) * ad_(i) * std::norm(z(i));
  return std::sqrt(nu2);
}

double WeightedProjective::inner(const CVec& u, const CVec& v) {
  return u.dot(v).real();  // Re sum conj(u_i) v_i
}

CVec WeightedProjective::horizontal_project(const CVec& z, const CVec& v) const {
  CVec xi = vertical_field(z);
  CVec gm = moment_gradient(z);
  double nu2 = inner(xi, xi);  // = inner(gm, gm)
  return v - (inner(v, xi) / nu2) * xi - (inner(v, gm) / nu2) * gm;
}

double WeightedProjective::quotient_metric(const CVec& z, const CVec& u, const CVec& v) const {
  return inner(horizontal_project(z, u), horizontal_project(z, v));
}

}  // namespace glmcf::projective
