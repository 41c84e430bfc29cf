#include "glmcf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "glmcf/errors.hpp"

namespace glmcf::lattice {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Sign-canonical form: first nonzero coefficient positive. +delta and -delta
// give the same norm, so the canonical representative is reported.
std::vector<long long> canonical(std::vector<long long> v) {
  for (long long c : v) {
    if (c > 0) break;
    if (c < 0) {
      for (auto& x : v) x = -x;
      break;
    }
  }
  return v;
}

bool lex_less(const std::vector<long long>& a, const std::vector<long long>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

double WeightVector::R() const { return kTwoPi * r; }

void WeightVector::validate() const {
  if (a.size() < 2) throw ValidationError("weights must have at least two components (n >= 1)");
  if (a[0] != 1) throw ValidationError("weights must start with 1");
  for (long long ai : a) {
    if (ai < 1) throw ValidationError("weights must be positive integers");
  }
  if (!(r > 0.0)) throw ValidationError("torus radius r must be positive");
}

TorusLattice build_lattice(const WeightVector& weights) {
  weights.validate();
  const int n = weights.n();
  const double R = weights.R();

  TorusLattice lat;
  lat.weights = weights;

  // Bookkeeping convention: the s=n formulas read a_1 as 0.
  std::vector<long long> ab = weights.a;
  ab[0] = 0;

  lat.S = 1;
  for (int i = 1; i <= n; ++i) lat.S += weights.a[i] * weights.a[i];

  lat.X.assign(n + 2, 0);
  for (int s = 1; s <= n; ++s) {
    long long sum = 0;
    for (int i = n + 1 - s; i <= n; ++i) sum += weights.a[i];  // a_{n+2-s}..a_{n+1}, 0-based
    lat.X[s] = sum;
  }
  lat.X[n + 1] = lat.X[n];

  lat.N.assign(n + 1, 0);
  for (int s = 1; s <= n; ++s) {
    lat.N[s] = ab[n - s] - ab[n + 1 - s];  // a_{n+1-s} - a_{n+2-s}, 0-based with a_1 := 0
  }

  // Basis column s-1 = OA_s = projection of R*m_s onto Pi_a,
  // m_s = (0,...,0,1,...,1) with s trailing ones.
  lat.basis.resize(n + 1, n);
  for (int s = 1; s <= n; ++s) {
    for (int k = 0; k <= n; ++k) {
      long long m = (k >= n + 1 - s) ? 1 : 0;
      double num = static_cast<double>(m) * lat.S - static_cast<double>(weights.a[k]) * lat.X[s];
      lat.basis(k, s - 1) = R * num / static_cast<double>(lat.S);
    }
  }

  // Gram from the closed form (R^2/S)(-X_s X_t + min(s,t) S); the dot-product
  // route is cross-checked in tests.
  lat.gramA.resize(n, n);
  for (int s = 1; s <= n; ++s) {
    for (int t = 1; t <= n; ++t) {
      long long num = -lat.X[s] * lat.X[t] + static_cast<long long>(std::min(s, t)) * lat.S;
      lat.gramA(s - 1, t - 1) = R * R * static_cast<double>(num) / static_cast<double>(lat.S);
    }
  }

  lat.Bint.resize(n, n);
  lat.Bint.setZero();
  for (int s = 1; s < n; ++s) {
    lat.Bint(s - 1, s - 1) = 2 + lat.N[s] * lat.N[s];
    lat.Bint(s - 1, s) = -1 + lat.N[s] * lat.N[s + 1];
    for (int t = s + 2; t <= n; ++t) lat.Bint(s - 1, t - 1) = lat.N[s] * lat.N[t];
  }
  lat.Bint(n - 1, n - 1) = 1 + lat.N[n] * lat.N[n];
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < s; ++t) lat.Bint(s, t) = lat.Bint(t, s);
  }

  lat.gramBoverR2 = lat.Bint.cast<double>() / (R * R);
  lat.dualGram = lat.gramBoverR2;
  return lat;
}

Eigen::MatrixXd inverse_gram_closed_form(const TorusLattice& lattice) {
  const double R = lattice.weights.R();
  return lattice.Bint.cast<double>() / (R * R);
}

Eigen::VectorXd project_to_basis(const TorusLattice& lattice, const Eigen::VectorXd& x) {
  const int n = lattice.n();
  if (x.size() != n + 1) throw ValidationError("project_to_basis: point dimension mismatch");
  const double R = lattice.weights.R();
  Eigen::VectorXd alpha(n);
  for (int s = 1; s <= n; ++s) {
    // alpha_s = (1/R){N_s x^1 - (x^{n+1-s} - x^{n+2-s})}; at s = n the
    // x^{n+1-s} term is absent (the last dual-basis row has the -1,+1
    // pattern, not -1,+2,-1).
    double val = static_cast<double>(lattice.N[s]) * x(0);
    if (s < n) {
      val -= x(n - s) - x(n + 1 - s);  // x^{n+1-s}, x^{n+2-s} in 0-based coords
    } else {
      val += x(1);
    }
    alpha(s - 1) = val / R;
  }
  return alpha;
}

ShortestResult shortest_dual_vector(const TorusLattice& lattice, ShortestMethod method,
                                    long long node_cap) {
  const int n = lattice.n();
  const double R2 = lattice.weights.R() * lattice.weights.R();

  auto qform = [&](const std::vector<long long>& d) {
    long long q = 0;
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) q += d[s] * lattice.Bint(s, t) * d[t];
    }
    return q;
  };

  // Restricted scan over {-1,0,1}^n \ {0}.
  ShortestResult best;
  best.q = -1;
  std::vector<long long> d(n, 0);
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      d[i] = static_cast<long long>(c % 3) - 1;
      if (d[i] != 0) zero = false;
      c /= 3;
    }
    if (zero) continue;
    long long q = qform(d);
    if (best.q < 0 || q < best.q) {
      best.q = q;
      best.coeffs = canonical(d);
    } else if (q == best.q) {
      auto cand = canonical(d);
      if (lex_less(cand, best.coeffs)) best.coeffs = cand;
    }
  }
  best.dSquared = static_cast<double>(best.q) / R2;
  if (method == ShortestMethod::restricted) return best;

  // Full bounded enumeration (Fincke-Pohst) of all integer vectors with
  // quadratic form value <= restricted minimum. Values are integers, so the
  // floating bound carries a 0.25 slack and candidates re-check exactly.
  Eigen::MatrixXd B = lattice.Bint.cast<double>();
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalError("dual Gram is not positive definite");
  Eigen::MatrixXd U = llt.matrixU();  // B = U^T U

  const double bound = static_cast<double>(best.q) + 0.25;
  ShortestResult full = best;
  full.nodes = 0;

  std::vector<long long> x(n, 0);
  std::vector<double> center(n, 0.0), partial(n + 1, 0.0);

  // Depth-first over levels n-1 .. 0; partial[k] = sum of squared contributions
  // from levels k..n-1.
  std::function<void(int)> descend = [&](int k) {
    if (++full.nodes > node_cap) {
      throw EnumerationBudgetError("shortest-vector enumeration exceeded node cap");
    }
    double remaining = bound - partial[k + 1];
    if (remaining < 0.0) return;
    // x_k ranges over integers with U_kk^2 (x_k - c_k)^2 <= remaining
    double ukk = U(k, k);
    double c = 0.0;
    for (int j = k + 1; j < n; ++j) c += U(k, j) * static_cast<double>(x[j]);
    c /= ukk;
    double half_width = std::sqrt(remaining) / ukk;
    long long lo = static_cast<long long>(std::ceil(-c - half_width - 1e-12));
    long long hi = static_cast<long long>(std::floor(-c + half_width + 1e-12));
    for (long long v = lo; v <= hi; ++v) {
      x[k] = v;
      double term = ukk * (static_cast<double>(v) + c);
      partial[k] = partial[k + 1] + term * term;
      if (k == 0) {
        bool zero = std::all_of(x.begin(), x.end(), [](long long e) { return e == 0; });
        if (zero) continue;
        long long q = qform(x);
        if (q < full.q) {
          full.q = q;
          full.coeffs = canonical(x);
        } else if (q == full.q) {
          auto cand = canonical(x);
          if (lex_less(cand, full.coeffs)) full.coeffs = cand;
        }
      } else {
        descend(k - 1);
      }
    }
    x[k] = 0;
  };
  partial[n] = 0.0;
  descend(n - 1);

  full.dSquared = static_cast<double>(full.q) / R2;
  return full;
}

bool has_repeated_component(const WeightVector& weights) {
  std::vector<long long> sorted = weights.a;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

SpectrumReport spectrum_report(const WeightVector& weights, long long node_cap) {
  weights.validate();
  TorusLattice lat = build_lattice(weights);
  ShortestResult restricted = shortest_dual_vector(lat, ShortestMethod::restricted, node_cap);
  ShortestResult full = shortest_dual_vector(lat, ShortestMethod::full, node_cap);

  SpectrumReport rep;
  rep.q = full.q;
  rep.dSquared = full.dSquared;
  rep.minimizer = full.coeffs;
  // lambda1 = 4 pi^2 d^2 = q / r^2 exactly; C = 2 / r^2.
  rep.lambda1 = static_cast<double>(full.q) / (weights.r * weights.r);
  rep.C = 2.0 / (weights.r * weights.r);
  const double tol = 1e-9;
  rep.stable = rep.lambda1 >= rep.C * (1.0 - tol);
  rep.equality = std::abs(rep.lambda1 - rep.C) <= tol * rep.C;
  rep.restrictedEqualsFull = restricted.q == full.q;
  return rep;
}

}  // namespace glmcf::lattice
