#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "glmcf/numerics.hpp"

namespace glmcf::ambient {

using Eigen::Matrix2d;
using Eigen::Vector2d;

struct ChartPoint {
  int chart = 0;
  Vector2d xy = Vector2d::Zero();
};

// Christoffel symbols Gamma^k_{ij}: gamma[k](i,j).
struct Christoffel {
  Matrix2d gamma[2];
};

// Weighted Kaehler background restricted to what curves need: a chart atlas
// with metric g, complex structure J, symplectic form w(X,Y) = g(JX,Y),
// weight f and its metric gradient, and the Levi-Civita connection.
class AmbientModel {
 public:
  virtual ~AmbientModel() = default;

  virtual int complex_dim() const = 0;
  virtual double einstein_constant() const = 0;
  virtual int chart_count() const = 0;
  virtual std::string name() const = 0;

  virtual Matrix2d metric(const ChartPoint& p) const = 0;
  virtual Matrix2d complex_structure(const ChartPoint& p) const = 0;
  virtual Matrix2d symplectic_form(const ChartPoint& p) const = 0;
  virtual double weight(const ChartPoint& p) const = 0;
  virtual Vector2d weight_gradient(const ChartPoint& p) const = 0;  // g^{ij} df_j
  virtual Christoffel christoffel(const ChartPoint& p) const = 0;

  // Express p in the given chart (identity when already there).
  virtual ChartPoint to_chart(const ChartPoint& p, int chart) const = 0;
  // Chart this point should be stored in (chart switching policy).
  virtual int preferred_chart(const ChartPoint& p) const = 0;
};

// Charts with metric e^{2u} I and standard J. All built-in curve models are
// of this form; u and f come from the concrete model.
class ConformalModel : public AmbientModel {
 public:
  struct Sample {
    double u = 0.0;        // log conformal factor
    Vector2d du = Vector2d::Zero();
    double f = 0.0;        // weight
    Vector2d df = Vector2d::Zero();
  };

  virtual Sample sample(int chart, const Vector2d& z) const = 0;

  int complex_dim() const override { return 1; }
  Matrix2d metric(const ChartPoint& p) const override;
  Matrix2d complex_structure(const ChartPoint& p) const override;
  Matrix2d symplectic_form(const ChartPoint& p) const override;
  double weight(const ChartPoint& p) const override;
  Vector2d weight_gradient(const ChartPoint& p) const override;
  Christoffel christoffel(const ChartPoint& p) const override;
  ChartPoint to_chart(const ChartPoint& p, int chart) const override;
  int preferred_chart(const ChartPoint& p) const override;
};

// Flat C with f = -C |z|^2 / 4, so C w + dd^c f = 0 = ricci.
class GaussianPlane final : public ConformalModel {
 public:
  explicit GaussianPlane(double C) : C_(C) {}
  double einstein_constant() const override { return C_; }
  int chart_count() const override { return 1; }
  std::string name() const override { return "gaussian_plane"; }
  Sample sample(int chart, const Vector2d& z) const override;

 private:
  double C_;
};

// Unit round sphere, f = 0, C = 1. Two stereographic charts glued by w = 1/z.
class RoundSphere final : public ConformalModel {
 public:
  double einstein_constant() const override { return 1.0; }
  int chart_count() const override { return 2; }
  std::string name() const override { return "round_sphere"; }
  Sample sample(int chart, const Vector2d& z) const override;
};

// Rotation-surface profile psi on [0, pi] with psi(0)=psi(pi)=0,
// psi'(0)=-psi'(pi)=1, plus the weight f solving  Delta_g f = K - C,
// normalized by integral f dA = 0.
struct WarpedProfile {
  std::vector<double> theta;   // dense grid on [0, pi]
  std::vector<double> psi, dpsi, kgauss;
  double C = 0.0;              // 4 pi / area
  double area = 0.0;

  CubicSpline psi_s, dpsi_s, k_s, f_s, df_s;
  CubicSpline sigma_s;          // isothermal coordinate on a pole-clipped band
  CubicSpline theta_of_sigma_s;
  double sigma_min = 0.0, sigma_max = 0.0;
  double theta_lo = 0.0, theta_hi = 0.0;

  static WarpedProfile builtin(const std::string& name, int grid = 4097);
  // Two-column "theta,psi" sample file.
  static WarpedProfile from_file(const std::string& path, int grid = 4097);
  static WarpedProfile from_callable(const std::function<double(double)>& psi_fn, int grid);
};

class WarpedSphere final : public ConformalModel {
 public:
  explicit WarpedSphere(WarpedProfile profile) : prof_(std::move(profile)) {}
  double einstein_constant() const override { return prof_.C; }
  int chart_count() const override { return 2; }
  std::string name() const override { return "warped_sphere"; }
  Sample sample(int chart, const Vector2d& z) const override;
  const WarpedProfile& profile() const { return prof_; }

  // theta for a point, and the chart point of (theta, phi); used by tests
  // and curve seeding.
  double colatitude(const ChartPoint& p) const;
  ChartPoint embed(double theta, double phi) const;

 private:
  WarpedProfile prof_;
};

// |K_gauss(p) - C - Delta_g f(p)| by finite differences on the chart.
// Only defined for complex dimension 1.
double weight_residual(const AmbientModel& model, const ChartPoint& p);

// Factory driven by config keys (model, C, profile, ...).
std::shared_ptr<AmbientModel> make_model(const std::string& name, double C,
                                         const std::string& profile = "",
                                         const std::string& profile_file = "");

}  // namespace glmcf::ambient
