#pragma once

#include <Eigen/Dense>
#include <vector>

namespace glmcf::spectral {

// Weighted Laplacian on a closed discrete curve, assembled in flux form
//   (D_f u)_i = e^{-f_i} [ e^{f_{i+1/2}} (u_{i+1}-u_i)/l_i
//                        - e^{f_{i-1/2}} (u_i-u_{i-1})/l_{i-1} ] / ds_i
// which is exactly self-adjoint and negative semidefinite in
// <u,v>_f = sum u_i v_i e^{f_i} ds_i, and kills constants exactly.
struct WeightedLaplacian {
  int N = 0;
  std::vector<double> wnode;  // e^{f_i} ds_i
  std::vector<double> wedge;  // e^{(f_i+f_{i+1})/2} / l_i, edge i -> i+1

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  // Dirichlet form int |grad u|^2 dmu_f as the edge sum consistent with apply:
  // dirichlet(u) == -<apply(u), u>_f exactly.
  double dirichlet(const Eigen::VectorXd& u) const;
  double total_measure() const;
};

// ds, f per node; ell = edge lengths (node i to i+1). Throws on degenerate
// edges.
WeightedLaplacian assemble(const std::vector<double>& ds, const std::vector<double>& f,
                           const std::vector<double>& ell);

struct EigenResult {
  double lambda1 = 0.0;  // first nonzero eigenvalue of -D_f
  double gap = 0.0;      // to the next eigenvalue
  Eigen::VectorXd phi;   // normalized <phi,phi>_f = 1
  bool simple = false;
  double residual = 0.0;  // weighted L2 norm of D_f phi + lambda1 phi
  std::vector<Eigen::VectorXd> eigenspace;  // basis of the first eigenspace
};

// Inverse (subspace) iteration with deflation of constants.
EigenResult first_eigenvalue(const WeightedLaplacian& op, double tol = 1e-11,
                             int max_iter = 500);

enum class Verdict { stable, borderline, unstable };

// Criterion lambda1 >= C at an f-minimal curve; band 1e-6 * max(C, 1).
Verdict stability_verdict(const EigenResult& eigen, double C);

const char* to_string(Verdict v);

}  // namespace glmcf::spectral
