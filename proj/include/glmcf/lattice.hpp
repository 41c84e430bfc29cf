#pragma once

#include <Eigen/Dense>
#include <vector>

namespace glmcf::lattice {

// Torus weights a = (1, a_2, ..., a_{n+1}), all >= 1, together with the torus
// radius r. R = 2*pi*r is always derived, never stored.
struct WeightVector {
  std::vector<long long> a;
  double r = 1.0;

  int n() const { return static_cast<int>(a.size()) - 1; }
  double R() const;
  void validate() const;  // throws ValidationError
};

// Flat-torus lattice data for the quotient of the Clifford torus by the
// weighted circle action. Integer quantities (S, X, N, B numerators) are kept
// exact; reals only appear in the basis and Gram matrices.
struct TorusLattice {
  WeightVector weights;
  long long S = 0;                      // 1 + sum_{i>=2} a_i^2
  std::vector<long long> X;             // X[0..n+1], partial sums, X[n+1] = X[n]
  std::vector<long long> N;             // N[s], s = 1..n (index 0 unused)
  Eigen::MatrixXd basis;                // (n+1) x n, column s-1 = OA_s
  Eigen::MatrixXd gramA;                // <OA_s, OA_t>
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> Bint;  // closed-form inverse numerators
  Eigen::MatrixXd gramBoverR2;          // Bint / R^2 == gramA^{-1}
  Eigen::MatrixXd dualGram;             // Gram of the dual basis == gramBoverR2

  int n() const { return weights.n(); }
};

TorusLattice build_lattice(const WeightVector& weights);

// Closed-form inverse (1/R^2) {B_st}; independently recomputable from Bint.
Eigen::MatrixXd inverse_gram_closed_form(const TorusLattice& lattice);

// Coefficients alpha with sum_s alpha_s OA_s = orthogonal projection of x
// onto the hyperplane Pi_a.
Eigen::VectorXd project_to_basis(const TorusLattice& lattice, const Eigen::VectorXd& x);

enum class ShortestMethod { restricted, full };

struct ShortestResult {
  long long q = 0;                  // integer quadratic form value: d^2 = q / R^2
  double dSquared = 0.0;
  std::vector<long long> coeffs;    // minimizing dual coefficients, canonical sign
  long long nodes = 0;              // enumeration nodes visited (full method)
};

// restricted: scan delta in {-1,0,1}^n \ {0}.
// full: Fincke-Pohst bounded enumeration below the restricted minimum; the
// exact lattice minimum. Throws EnumerationBudgetError past node_cap.
ShortestResult shortest_dual_vector(const TorusLattice& lattice, ShortestMethod method,
                                    long long node_cap = 10'000'000);

struct SpectrumReport {
  double dSquared = 0.0;
  std::vector<long long> minimizer;
  double lambda1 = 0.0;   // 4 pi^2 d^2
  double C = 0.0;         // 2 / r^2
  bool stable = false;    // lambda1 >= C - tol
  bool equality = false;  // |lambda1 - C| <= tol * C
  bool restrictedEqualsFull = false;
  long long q = 0;        // integer d^2 * R^2
};

SpectrumReport spectrum_report(const WeightVector& weights, long long node_cap = 10'000'000);

// Structural side of the first-eigenvalue theorem: some two components of a
// coincide (the multiset predicate the equality flag is checked against).
bool has_repeated_component(const WeightVector& weights);

}  // namespace glmcf::lattice
