#include "glmcf/numerics.hpp"

#include <algorithm>
#include <cassert>

namespace glmcf {

void CubicSpline::build(std::vector<double> x, std::vector<double> y, bool clamped, double d0,
                        double dn) {
  const std::size_t n = x.size();
  assert(n >= 3 && y.size() == n);
  x_ = std::move(x);
  y_ = std::move(y);
  m_.assign(n, 0.0);

  // Tridiagonal solve for knot second derivatives (Thomas algorithm).
  std::vector<double> a(n), b(n), c(n), r(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hm = x_[i] - x_[i - 1];
    double hp = x_[i + 1] - x_[i];
    a[i] = hm / 6.0;
    b[i] = (hm + hp) / 3.0;
    c[i] = hp / 6.0;
    r[i] = (y_[i + 1] - y_[i]) / hp - (y_[i] - y_[i - 1]) / hm;
  }
  if (clamped) {
    double h0 = x_[1] - x_[0];
    b[0] = h0 / 3.0;
    c[0] = h0 / 6.0;
    r[0] = (y_[1] - y_[0]) / h0 - d0;
    double hn = x_[n - 1] - x_[n - 2];
    a[n - 1] = hn / 6.0;
    b[n - 1] = hn / 3.0;
    r[n - 1] = dn - (y_[n - 1] - y_[n - 2]) / hn;
  } else {
    b[0] = 1.0;
    c[0] = 0.0;
    r[0] = 0.0;
    a[n - 1] = 0.0;
    b[n - 1] = 1.0;
    r[n - 1] = 0.0;
  }
  for (std::size_t i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  m_[n - 1] = r[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }
}

std::size_t CubicSpline::segment(double x) const {
  const std::size_t n = x_.size();
  if (x <= x_[0]) return 0;
  if (x >= x_[n - 1]) return n - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicSpline::eval(double x) const {
  std::size_t i = segment(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h;
  double B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
  std::size_t i = segment(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h;
  double B = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((3.0 * B * B - 1.0) * m_[i + 1] - (3.0 * A * A - 1.0) * m_[i]) * h / 6.0;
}

double CubicSpline::deriv2(double x) const {
  std::size_t i = segment(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h;
  double B = (x - x_[i]) / h;
  return A * m_[i] + B * m_[i + 1];
}

}  // namespace glmcf
