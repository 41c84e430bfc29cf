#include "glmcf/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <numbers>

#include "glmcf/errors.hpp"

namespace glmcf::spectral {

Eigen::VectorXd WeightedLaplacian::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(N);
  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    out(i) = (wedge[i] * (u(ip) - u(i)) - wedge[im] * (u(i) - u(im))) / wnode[i];
  }
  return out;
}

double WeightedLaplacian::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += u(i) * v(i) * wnode[i];
  return s;
}

double WeightedLaplacian::dirichlet(const Eigen::VectorXd& u) const {
  double s = 0.0;
  for (int i = 0; i < N; ++i) {
    int ip = (i + 1) % N;
    double d = u(ip) - u(i);
    s += wedge[i] * d * d;
  }
  return s;
}

double WeightedLaplacian::total_measure() const {
  double s = 0.0;
  for (double w : wnode) s += w;
  return s;
}

WeightedLaplacian assemble(const std::vector<double>& ds, const std::vector<double>& f,
                           const std::vector<double>& ell) {
  const int N = static_cast<int>(ds.size());
  if (N < 3 || f.size() != ds.size() || ell.size() != ds.size()) {
    throw ValidationError("assemble: inconsistent geometry arrays");
  }
  WeightedLaplacian op;
  op.N = N;
  op.wnode.resize(N);
  op.wedge.resize(N);
  for (int i = 0; i < N; ++i) {
    if (ell[i] < 1e-10) throw NumericalError("assemble: degenerate edge");
    op.wnode[i] = std::exp(f[i]) * ds[i];
    op.wedge[i] = std::exp(0.5 * (f[i] + f[(i + 1) % N])) / ell[i];
  }
  return op;
}

namespace {

// M-orthonormalize columns against the constant and each other.
void orthonormalize(const WeightedLaplacian& op, std::vector<Eigen::VectorXd>& v) {
  const int N = op.N;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
  double m1 = std::sqrt(op.inner(ones, ones));
  ones /= m1;
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] -= op.inner(ones, v[k]) * ones;
    for (std::size_t j = 0; j < k; ++j) v[k] -= op.inner(v[j], v[k]) * v[j];
    double n = std::sqrt(op.inner(v[k], v[k]));
    if (n < 1e-300) {
      // replace a collapsed direction with a deterministic kick
      for (int i = 0; i < N; ++i) v[k](i) = std::sin((k + 2.0) * 2.0 * std::numbers::pi * i / N);
      v[k] -= op.inner(ones, v[k]) * ones;
      for (std::size_t j = 0; j < k; ++j) v[k] -= op.inner(v[j], v[k]) * v[j];
      n = std::sqrt(op.inner(v[k], v[k]));
    }
    v[k] /= n;
  }
}

void canonical_sign(Eigen::VectorXd& v) {
  int arg = 0;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best + 1e-14) {
      best = std::abs(v(i));
      arg = i;
    }
  }
  if (v(arg) < 0.0) v = -v;
}

}  // namespace

EigenResult first_eigenvalue(const WeightedLaplacian& op, double tol, int max_iter) {
  const int N = op.N;
  const int block = std::min(6, N - 2);

  // Stiffness A (= -M D_f, SPD on the complement of constants) shifted by
  // sigma M so the factorization is definite; pencil eigenvalues shift by
  // sigma, eigenvectors unchanged.
  double lg = 0.0;
  for (int i = 0; i < N; ++i) lg += op.wnode[i];
  const double sigma = 0.25 * std::pow(2.0 * std::numbers::pi / lg, 2);

  Eigen::SparseMatrix<double> B(N, N);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * N);
    for (int i = 0; i < N; ++i) {
      int im = (i + N - 1) % N;
      int ip = (i + 1) % N;
      trip.emplace_back(i, i, op.wedge[i] + op.wedge[im] + sigma * op.wnode[i]);
      trip.emplace_back(i, ip, -op.wedge[i]);
      trip.emplace_back(i, im, -op.wedge[im]);
    }
    B.setFromTriplets(trip.begin(), trip.end());
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(B);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen solve: factorization failed");
  }

  // Low trigonometric modes seed the subspace; exact on uniform circles.
  std::vector<Eigen::VectorXd> v(block, Eigen::VectorXd::Zero(N));
  for (int k = 0; k < block; ++k) {
    int mode = k / 2 + 1;
    for (int i = 0; i < N; ++i) {
      double ang = 2.0 * std::numbers::pi * mode * i / N;
      v[k](i) = (k % 2 == 0) ? std::sin(ang) : std::cos(ang);
    }
  }
  orthonormalize(op, v);

  Eigen::VectorXd ritz = Eigen::VectorXd::Zero(block);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (int k = 0; k < block; ++k) {
      Eigen::VectorXd rhs(N);
      for (int i = 0; i < N; ++i) rhs(i) = op.wnode[i] * v[k](i);
      v[k] = solver.solve(rhs);
    }
    orthonormalize(op, v);

    // Rayleigh-Ritz on the block: entries <v_j, -D_f v_k>_f.
    Eigen::MatrixXd Ar(block, block);
    std::vector<Eigen::VectorXd> Av(block);
    for (int k = 0; k < block; ++k) Av[k] = op.apply(v[k]);
    for (int j = 0; j < block; ++j) {
      for (int k = 0; k < block; ++k) Ar(j, k) = -op.inner(v[j], Av[k]);
    }
    Ar = 0.5 * (Ar + Ar.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar);
    ritz = es.eigenvalues();
    std::vector<Eigen::VectorXd> rotated(block, Eigen::VectorXd::Zero(N));
    for (int k = 0; k < block; ++k) {
      for (int j = 0; j < block; ++j) rotated[k] += es.eigenvectors()(j, k) * v[j];
    }
    v = std::move(rotated);

    // converged when the two lowest pairs have small weighted residuals
    bool ok = true;
    for (int k = 0; k < std::min(2, block); ++k) {
      Eigen::VectorXd r = op.apply(v[k]) + ritz(k) * v[k];
      double res = std::sqrt(op.inner(r, r));
      if (res > tol * std::max(1.0, ritz(0))) ok = false;
    }
    if (ok) break;
    if (iter + 1 == max_iter) {
      throw NumericalError("eigenvalue iteration did not converge");
    }
  }

  EigenResult out;
  out.lambda1 = ritz(0);
  out.gap = (block > 1) ? ritz(1) - ritz(0) : 0.0;
  out.simple = out.gap >= 1e-6 * std::max(out.lambda1, 1e-300);
  for (int k = 0; k < block; ++k) {
    if (ritz(k) <= out.lambda1 * (1.0 + 1e-6)) {
      Eigen::VectorXd e = v[k];
      canonical_sign(e);
      out.eigenspace.push_back(e);
    }
  }
  out.phi = out.eigenspace.front();
  Eigen::VectorXd r = op.apply(out.phi) + out.lambda1 * out.phi;
  out.residual = std::sqrt(op.inner(r, r));
  return out;
}

Verdict stability_verdict(const EigenResult& eigen, double C) {
  const double band = 1e-6 * std::max(C, 1.0);
  if (eigen.lambda1 >= C + band) return Verdict::stable;
  if (eigen.lambda1 <= C - band) return Verdict::unstable;
  return Verdict::borderline;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::borderline: return "borderline";
    default: return "unstable";
  }
}

}  // namespace glmcf::spectral
