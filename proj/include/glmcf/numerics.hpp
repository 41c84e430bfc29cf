#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace glmcf {

// Deterministic RNG. std::mt19937_64 sequences are pinned by the standard but
// the distributions are not, so the transforms live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller, cached pair
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Central-difference derivative of fn at 0 with Richardson extrapolation.
// levels = number of step halvings; error after extrapolation is O(h0^(2*levels)).
inline double richardson_derivative(const std::function<double(double)>& fn, double h0,
                                    int levels = 3) {
  std::vector<double> row(levels);
  double h = h0;
  for (int i = 0; i < levels; ++i) {
    row[i] = (fn(h) - fn(-h)) / (2.0 * h);
    h *= 0.5;
  }
  // Richardson table in place
  double factor = 4.0;
  for (int j = 1; j < levels; ++j) {
    for (int i = levels - 1; i >= j; --i) {
      row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
    }
    factor *= 4.0;
  }
  return row[levels - 1];
}

// Second derivative at 0, central stencil (fn(h) - 2 fn(0) + fn(-h)) / h^2,
// Richardson-extrapolated in h.
inline double richardson_second_derivative(const std::function<double(double)>& fn, double h0,
                                           int levels = 3) {
  double f0 = fn(0.0);
  std::vector<double> row(levels);
  double h = h0;
  for (int i = 0; i < levels; ++i) {
    row[i] = (fn(h) - 2.0 * f0 + fn(-h)) / (h * h);
    h *= 0.5;
  }
  double factor = 4.0;
  for (int j = 1; j < levels; ++j) {
    for (int i = levels - 1; i >= j; --i) {
      row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
    }
    factor *= 4.0;
  }
  return row[levels - 1];
}

// Natural cubic spline on a strictly increasing grid; clamped endpoints optional.
class CubicSpline {
 public:
  CubicSpline() = default;

  // If clamped, d0/dn are the prescribed endpoint first derivatives.
  void build(std::vector<double> x, std::vector<double> y, bool clamped = false,
             double d0 = 0.0, double dn = 0.0);

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  bool empty() const { return x_.empty(); }

 private:
  std::size_t segment(double x) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
};

// Least-squares line fit y = a + b x; returns {a, b}.
inline std::pair<double, double> linear_fit(const std::vector<double>& x,
                                            const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double b = (n * sxy - sx * sy) / denom;
  double a = (sy - b * sx) / n;
  return {a, b};
}

}  // namespace glmcf
